from django.core.management import call_command
from django.core.management.base import BaseCommand


class Command(BaseCommand):
    help = "Run the exact-oracle and entropy test suites"

    def handle(self, *args, **options):
        call_command('test', 'oracle', 'entropy', verbosity=options['verbosity'])
