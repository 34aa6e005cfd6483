from .vartable import *
from .poly import *
from .ratfunc import *
from .linsolve import *
from .roots import *
from .quotient import *
from .text import *
