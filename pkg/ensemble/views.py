import logging
from django.http import JsonResponse
from django.views.decorators.http import require_http_methods
from django.db import DatabaseError

from .models import SimulationRun

logger = logging.getLogger(__name__)

MAX_LIMIT = 500


def _limit(request, default=50):
    try:
        limit = int(request.GET.get('limit', default))
    except ValueError:
        return None
    if limit < 1:
        return None
    return min(limit, MAX_LIMIT)


@require_http_methods(["GET"])
def list_runs(request):
    """Recorded simulation runs, newest first; ?model= and ?two_s= filter."""
    limit = _limit(request)
    if limit is None:
        return JsonResponse({
            'status': 'error',
            'message': 'limit must be a positive integer'
        }, status=400)

    try:
        runs = SimulationRun.objects.all()
        if request.GET.get('model'):
            runs = runs.filter(model=request.GET['model'])
        if request.GET.get('two_s'):
            runs = runs.filter(two_s=int(request.GET['two_s']))
        payload = [run.as_json() for run in runs[:limit]]
        return JsonResponse({
            'status': 'success',
            'count': len(payload),
            'runs': payload
        })
    except ValueError:
        return JsonResponse({
            'status': 'error',
            'message': 'two_s must be an integer'
        }, status=400)
    except DatabaseError as e:
        logger.error(f"Error listing simulation runs: {e}", exc_info=True)
        return JsonResponse({
            'status': 'error',
            'message': str(e)
        }, status=500)


@require_http_methods(["GET"])
def run_detail(request, run_id):
    try:
        run = SimulationRun.objects.get(pk=run_id)
    except SimulationRun.DoesNotExist:
        return JsonResponse({
            'status': 'error',
            'message': f'Run {run_id} not found'
        }, status=404)
    except DatabaseError as e:
        logger.error(f"Error reading simulation run {run_id}: {e}", exc_info=True)
        return JsonResponse({
            'status': 'error',
            'message': str(e)
        }, status=500)

    return JsonResponse({
        'status': 'success',
        'run': run.as_json()
    })
