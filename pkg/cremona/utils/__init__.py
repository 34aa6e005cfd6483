from .payload import *
