from django.dispatch import Signal

# sent with ``experiment`` and ``status`` on every status transition
experiment_status_changed = Signal()
