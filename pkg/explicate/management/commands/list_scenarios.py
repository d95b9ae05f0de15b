from django.core.management.base import BaseCommand

from explicate.scenarios import list_scenarios


class Command(BaseCommand):
    help = "List the scenario kinds a config can request."

    def handle(self, *args, **options):
        entries = list_scenarios()
        width = max(len(entry["kind"]) for entry in entries)
        for entry in entries:
            self.stdout.write(f"{entry['kind']:<{width}}  {entry['description']}")
