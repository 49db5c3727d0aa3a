import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "pmlfsla_project.settings")
django.setup()
