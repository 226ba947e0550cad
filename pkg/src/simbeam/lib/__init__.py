from . import units as units
from .yaml_loader import Loader, safe_loader, dump_yaml
from .table import tabulate, display, console
