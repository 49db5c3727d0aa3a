from pmlfsla.data import make_folds
from pmlfsla.evaluation import cross_validate, parameter_sweep, robustness_spread
from pmlfsla.exports import write_comparison, write_grid, write_report
from pmlfsla.management.base import PmlCommand
from pmlfsla.ranking import RankingMethod, feature_budgets


class Command(PmlCommand):
    help = (
        "Compare the QR ranking with the Q-only ablation on the same folds and seed. "
        "--grid adds a one-at-a-time sweep of alpha, beta and gamma"
    )

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_noise_arguments(parser)
        self.add_optics_arguments(parser)
        self.add_fit_arguments(parser)
        self.add_evaluation_arguments(parser)
        parser.add_argument("--grid", action="store_true", default=None, help="Sweep alpha, beta, gamma over 0.001..1000")

    def run(self, cfg):
        ds = self.load_labelled_dataset(cfg)
        fractions = feature_budgets(ds.d, cfg.fractions)
        plan = make_folds(ds.n, cfg.folds, cfg.seed)
        hp = cfg.hyper_params()
        optics_params = cfg.optics_params()

        report = cross_validate(
            ds,
            None,
            fractions,
            plan,
            hp,
            methods=(RankingMethod.QR, RankingMethod.Q_ONLY),
            optics_params=optics_params,
            k=cfg.k,
            random_orders=cfg.random_baselines,
            n_jobs=cfg.n_jobs,
        )
        out_dir = self.out_dir(cfg)
        write_report(report, out_dir)
        write_comparison(report, out_dir / "comparison.csv")
        for metric in ("micro_f1", "macro_f1"):
            self.stdout.write(
                f"{metric}: QR {report.mean_of(RankingMethod.QR, metric):.4f} "
                f"Q_ONLY {report.mean_of(RankingMethod.Q_ONLY, metric):.4f}"
            )

        if cfg.grid:
            grid = parameter_sweep(ds, None, fractions, plan, hp, optics_params=optics_params, k=cfg.k, n_jobs=cfg.n_jobs)
            write_grid(grid, out_dir / "grid.csv")
            for parameter, spread in robustness_spread(grid).items():
                self.stdout.write(f"ranking_loss spread over {parameter}: {spread:.4f}")
        self.write_config(cfg)
