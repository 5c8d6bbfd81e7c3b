"""Configure Django for pytest, as manage.py does for `manage.py test`."""
import os

import django
from django.test.utils import setup_test_environment

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'teicp_suite.settings')
django.setup()
setup_test_environment()
