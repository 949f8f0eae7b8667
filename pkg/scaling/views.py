import logging
from django.http import JsonResponse
from django.views.decorators.http import require_http_methods
from django.db import DatabaseError

from .models import ScalingFitRecord

logger = logging.getLogger(__name__)


@require_http_methods(["GET"])
def list_fits(request):
    """Recorded q_ext fits, newest first; ?model= filters by Hamiltonian."""
    try:
        fits = ScalingFitRecord.objects.all()
        if request.GET.get('model'):
            fits = fits.filter(model=request.GET['model'])
        payload = [fit.as_json() for fit in fits]
        return JsonResponse({
            'status': 'success',
            'count': len(payload),
            'fits': payload
        })
    except DatabaseError as e:
        logger.error(f"Error listing scaling fits: {e}", exc_info=True)
        return JsonResponse({
            'status': 'error',
            'message': str(e)
        }, status=500)
