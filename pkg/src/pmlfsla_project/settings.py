"""
Django settings for the pmlfsla project.

Only the pieces the command-line tools need are configured: installed apps, logging and
the PMLFSLA block holding run defaults. There is no database, no URL configuration and
no web server.
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Required by Django
SECRET_KEY = os.environ.get("PMLFSLA_SECRET_KEY", "pmlfsla-command-line-only")

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",
    "pmlfsla",
]

DATABASES = {}

USE_TZ = True

TIME_ZONE = "UTC"


# Logging

LOG_LEVEL = os.environ.get("PMLFSLA_LOG_LEVEL", "INFO").upper()

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name}: {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
    "loggers": {
        "pmlfsla": {
            "level": LOG_LEVEL,
        },
    },
}


# Run defaults. Precedence: command-line flags > --config JSON file > these values
PMLFSLA = {
    "x": None,
    "y": None,
    "truth": None,
    "dataset": None,
    "out_dir": "out",
    "radius": 1.0,
    "min_pts": 5,
    "k": None,
    "alpha": 1.0,
    "beta": 1.0,
    "gamma": 1.0,
    "delta": 1.0,
    "eps_d": 1e-8,
    "eps_div": 1e-12,
    "max_iter": 500,
    "rel_tol": 1e-6,
    "fractions": [round(0.01 * i, 2) for i in range(1, 21)],
    "folds": 10,
    "seed": 0,
    "noise_rate": None,
    "method": "qr",
    "trace": False,
    "plain_frobenius_penalty": False,
    "grid": False,
    "n_jobs": 1,
    "random_baselines": 0,
}
