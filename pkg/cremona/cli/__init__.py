from .app import *
from .command import *
from .commands import *
from .config import *
from .context import *
