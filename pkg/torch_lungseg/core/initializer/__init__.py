from .initializer import init_weights
