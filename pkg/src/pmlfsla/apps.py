from django.apps import AppConfig


class PmlFslaConfig(AppConfig):
    name = "pmlfsla"
    verbose_name = "Partial multi-label feature selection"
