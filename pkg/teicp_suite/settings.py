"""
Django settings for the teicp_suite project.

The project has no web surface; Django provides configuration, logging,
the management-command CLI and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.0/ref/settings/
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-teicp-suite-local-key')

DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'teicp_suite',  # Project package carries the solve/multistart/trace commands
    'pareto',  # Tensors, merits, projections, solvers and oracles
]

MIDDLEWARE = []

# The solvers keep no state between runs
DATABASES = {}

TIME_ZONE = os.getenv('TIME_ZONE', 'UTC')

USE_TZ = True


# Solver defaults, merged into SolverConfig.from_settings()

TEICP_SOLVER_DEFAULTS = {
    'tol': float(os.getenv('TEICP_TOL', '1e-6')),
    'max_iters': int(os.getenv('TEICP_MAX_ITERS', '500')),
    'rho': float(os.getenv('TEICP_RHO', '1e-4')),
    'tau': float(os.getenv('TEICP_TAU', '0.05')),
    'beta_min': float(os.getenv('TEICP_BETA_MIN', '1e-10')),
    'beta_max': float(os.getenv('TEICP_BETA_MAX', '1e10')),
    'max_backtracks': int(os.getenv('TEICP_MAX_BACKTRACKS', '50')),
    'certify_tol': float(os.getenv('TEICP_CERTIFY_TOL', '1e-4')),
}

# Experiment driver
TEICP_MULTISTART_RUNS = int(os.getenv('TEICP_MULTISTART_RUNS', '100'))
TEICP_SEED = int(os.getenv('TEICP_SEED', '0'))
TEICP_WORKERS = int(os.getenv('TEICP_WORKERS', '1'))
TEICP_HISTOGRAM_BIN = float(os.getenv('TEICP_HISTOGRAM_BIN', '1e-3'))
TEICP_OUTPUT_DIR = Path(os.getenv('TEICP_OUTPUT_DIR', str(BASE_DIR / 'results')))


# Logging

TEICP_LOG_LEVEL = os.getenv('TEICP_LOG_LEVEL', 'WARNING').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'pareto': {
            'handlers': ['console'],
            'level': TEICP_LOG_LEVEL,
            'propagate': False,
        },
        'teicp_suite': {
            'handlers': ['console'],
            'level': TEICP_LOG_LEVEL,
            'propagate': False,
        },
    },
}
