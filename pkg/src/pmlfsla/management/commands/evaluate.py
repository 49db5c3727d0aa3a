from pmlfsla.data import make_folds
from pmlfsla.evaluation import cross_validate
from pmlfsla.exports import write_report
from pmlfsla.management.base import PmlCommand
from pmlfsla.ranking import feature_budgets


class Command(PmlCommand):
    help = (
        "Cross-validate the feature ranking: refit on each training split's candidate labels, "
        "then score a ridge classifier on the selected features against ground truth"
    )

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser)
        self.add_noise_arguments(parser)
        self.add_optics_arguments(parser)
        self.add_fit_arguments(parser)
        self.add_evaluation_arguments(parser)

    def run(self, cfg):
        ds = self.load_labelled_dataset(cfg)
        report = cross_validate(
            ds,
            None,
            feature_budgets(ds.d, cfg.fractions),
            make_folds(ds.n, cfg.folds, cfg.seed),
            cfg.hyper_params(),
            methods=cfg.ranking_methods(),
            optics_params=cfg.optics_params(),
            k=cfg.k,
            random_orders=cfg.random_baselines,
            n_jobs=cfg.n_jobs,
        )
        paths = write_report(report, self.out_dir(cfg))
        self.write_config(cfg)
        self.stdout.write(f"Wrote {paths['report']} and {paths['summary']}")
