from .functions import (
    Conv2dFunction,
    ConvTranspose2dFunction,
    BatchNorm2dFunction,
    ActivationFunction,
    DropoutFunction,
    same_padding,
)
