"""
Standalone ``wignerweb`` entry point: configures a minimal Django
environment when none is present and dispatches to the ``wignerweb``
management command.

Exit status: 0 on success, 1 on invalid input or configuration,
2 when a numerical guard aborted the run.
"""
import os
import sys

import django
from django.conf import settings
from django.core.exceptions import ValidationError
from django.core.management import call_command
from django.core.management.base import CommandError

from .exceptions import NumericalGuardError, WignerwebError

USAGE = 'usage: wignerweb {simulate,fig1,fig2,fig3,fig4,chi,lyapunov,render,validate} [options]'


def configure():
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=['django.contrib.contenttypes', 'django_wignerweb'],
        DATABASES={'default': {'ENGINE': 'django.db.backends.sqlite3', 'NAME': ':memory:'}},
        DEFAULT_AUTO_FIELD='django.db.models.AutoField',
        WIGNERWEB_OUTPUT_DIR=os.environ.get('WIGNERWEB_OUTPUT_DIR', 'wignerweb-output'),
        LOGGING={
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {'simple': {'format': '%(levelname)s %(name)s: %(message)s'}},
            'handlers': {'console': {'class': 'logging.StreamHandler', 'formatter': 'simple'}},
            'loggers': {'django_wignerweb': {'handlers': ['console'], 'level': 'WARNING'}},
        },
    )


def _messages(error):
    if isinstance(error, ValidationError):
        return '; '.join(error.messages)
    return str(error)


def cli_main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        sys.stdout.write(USAGE + '\n')
        return 0 if argv else 1
    configure()
    django.setup()
    try:
        call_command('wignerweb', *argv)
    except NumericalGuardError as e:
        sys.stderr.write('wignerweb: numerical guard: {0}\n'.format(e))
        return 2
    except (CommandError, ValidationError, WignerwebError) as e:
        sys.stderr.write('wignerweb: error: {0}\n{1}\n'.format(_messages(e), USAGE))
        return 1
    return 0


def main():
    sys.exit(cli_main())
