from django.core.management.base import BaseCommand, CommandError

from explicate.exceptions import ConfigurationError
from explicate.scenarios import run_scenario
from explicate.services import load_config

CHECK_FAILURE = 1
CONFIG_ERROR = 2
RUNTIME_ERROR = 3


class Command(BaseCommand):
    help = "Run one scenario from a JSON config, verify its checks and export CSV/JSON artifacts."

    def add_arguments(self, parser):
        parser.add_argument("config", help="path to a scenario config (JSON)")
        parser.add_argument("--output-dir", help="artifact directory; overrides the config's output_dir")
        parser.add_argument("--seed", type=int, help="seed for the randomized scenarios; overrides the config")
        parser.add_argument("--quiet", action="store_true", help="do not print the report")

    def handle(self, *args, **options):
        try:
            config = load_config(options["config"])
        except ConfigurationError as err:
            raise CommandError(str(err), returncode=CONFIG_ERROR)

        if options["seed"] is not None:
            config = config.with_overrides(seed=options["seed"])

        try:
            report = run_scenario(config, options["output_dir"])
        except ValueError as err:
            raise CommandError(f"{config.kind} scenario stopped: {err}", returncode=RUNTIME_ERROR)

        if not options["quiet"]:
            self.stdout.write(report.render())

        if not report.passed:
            failed = ", ".join(check.key for check in report.failures)
            raise CommandError(f"{len(report.failures)} check(s) failed: {failed}", returncode=CHECK_FAILURE)
