from django.core.validators import RegexValidator
from django.utils.regex_helper import _lazy_re_compile
from django.utils.translation import gettext_lazy as _

# experiment names double as output directory names
name_validator = RegexValidator(
    _lazy_re_compile(r'^[A-Za-z0-9][A-Za-z0-9_.-]*$'),
    message=_('Name must start with a letter or digit and contain only letters, '
              'digits, dots, dashes and underscores.'),
    code='invalid',
)

checksum_validator = RegexValidator(
    _lazy_re_compile(r'^[0-9a-f]{32}$'),
    message=_('Must be an md5 hex digest.'),
    code='invalid',
)
