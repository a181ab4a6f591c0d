import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'OmegaLab.settings')
django.setup()
