from .algebra import *
from .cache import *
from .dynamics import *
from .elliptic import *
from .enums import *
from .equiperiodic import *
from .errors import *
from .model import *
from .periodicity import *
from .runner import *
from .scheme import *
from .utils import *

__version__ = "0.1.0"
