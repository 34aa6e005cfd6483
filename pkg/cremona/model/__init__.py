from .system import *
from .dsl import *
from .builtins import *
