import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand, CommandError

from pmlfsla.config import RunConfig, dump_run_config, load_run_config
from pmlfsla.data import PmlDataset, inject_candidate_noise, load_csv_pair, normalize_minmax
from pmlfsla.exceptions import ConfigError, PmlFslaError
from pmlfsla.exports import write_json
from pmlfsla.serializers import RunConfigSerializer

logger = logging.getLogger(__name__)


def fraction_list(value: str):
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value!r}")


class PmlCommand(BaseCommand):
    """
    Base for the pipeline commands. Subclasses declare their flags with the add_*
    helpers and implement `run(cfg)`. Library errors become CommandError with the
    matching exit code
    """

    requires_system_checks = []

    def add_dataset_arguments(self, parser):
        parser.add_argument("--x", help="Feature matrix CSV")
        parser.add_argument("--y", help="Candidate label matrix CSV (0/1)")
        parser.add_argument("--truth", help="Ground-truth label CSV, same shape as --y")
        parser.add_argument("--dataset", help="Dataset name used in reports; defaults to the stem of --y")
        parser.add_argument("--seed", type=int)
        parser.add_argument("--out-dir")
        parser.add_argument("--config", help="JSON file with run settings; flags override it")

    def add_noise_arguments(self, parser):
        parser.add_argument("--noise-rate", type=float, help="Probability of flipping an absent label to a candidate")

    def add_optics_arguments(self, parser):
        parser.add_argument("--radius", type=float, help="OPTICS generating distance")
        parser.add_argument("--min-pts", type=int)
        parser.add_argument("--k", type=int, help="Fix the latent dimension instead of clustering")

    def add_fit_arguments(self, parser):
        parser.add_argument("--alpha", type=float)
        parser.add_argument("--beta", type=float)
        parser.add_argument("--gamma", type=float)
        parser.add_argument("--delta", type=float, help="Weight tying the disambiguated labels to the candidates")
        parser.add_argument("--max-iter", type=int)
        parser.add_argument("--rel-tol", type=float)
        parser.add_argument(
            "--plain-frobenius-penalty",
            action="store_true",
            default=None,
            help="Leave the reweighting matrix out of the sparsity terms of the Q and R updates",
        )
        parser.add_argument("--method", choices=["qr", "q-only", "both"])

    def add_evaluation_arguments(self, parser):
        parser.add_argument("--fractions", type=fraction_list, help="Comma-separated feature budgets in (0, 1]")
        parser.add_argument("--folds", type=int)
        parser.add_argument("--n-jobs", type=int)
        parser.add_argument("--random-baselines", type=int, help="Average of N seeded random rankings as a baseline")

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        # argument errors raise CommandError (exit 1) instead of argparse's exit 2
        parser.called_from_command_line = False
        return parser

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as e:
            self.stderr.write(f"{e.__class__.__name__}: {e}")
            sys.exit(e.returncode)

    def handle(self, *args: Any, **options: Any):
        if options["verbosity"] >= 2:
            logging.getLogger("pmlfsla").setLevel(logging.DEBUG)
        elif options["verbosity"] == 0:
            logging.getLogger("pmlfsla").setLevel(logging.WARNING)
        try:
            fields = RunConfigSerializer().fields
            flags = {name: value for name, value in options.items() if name in fields}
            cfg = load_run_config(flags, options.get("config"))
            self.run(cfg)
        except PmlFslaError as e:
            raise CommandError(str(e), returncode=e.exit_code)

    def run(self, cfg: RunConfig):
        raise NotImplementedError("subclasses of PmlCommand must provide a run() method")

    def out_dir(self, cfg: RunConfig) -> Path:
        path = Path(cfg.out_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def load_dataset(self, cfg: RunConfig, truth: bool = False) -> PmlDataset:
        if not cfg.x or not cfg.y:
            raise ConfigError("Both --x and --y are required")
        ds = load_csv_pair(cfg.x, cfg.y, cfg.truth if truth else None, name=cfg.dataset)
        return normalize_minmax(ds)

    def load_labelled_dataset(self, cfg: RunConfig) -> PmlDataset:
        """
        Dataset with ground truth attached: from --truth, or by treating --y as clean and
        injecting candidate noise at --noise-rate
        """
        if cfg.truth:
            if cfg.noise_rate is not None:
                logger.warning("--truth is given; ignoring --noise-rate %g", cfg.noise_rate)
            return self.load_dataset(cfg, truth=True)
        if cfg.noise_rate is not None:
            return inject_candidate_noise(self.load_dataset(cfg), cfg.noise_rate, cfg.seed)
        raise ConfigError("Evaluation needs ground truth: pass --truth, or --noise-rate to corrupt a clean --y")

    def write_config(self, cfg: RunConfig) -> Path:
        return write_json(dump_run_config(cfg), self.out_dir(cfg) / "config.json")
