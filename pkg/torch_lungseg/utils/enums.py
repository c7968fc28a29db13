import enum


class InferenceMode(enum.Enum):
    EVAL = "eval"
    TRAIN = "train"


class Aggregation(enum.Enum):
    MICRO = "micro"
    MACRO = "macro"


class Interpolation(enum.Enum):
    BILINEAR = "bilinear"
    NEAREST = "nearest"


class Padding(enum.Enum):
    SAME = "same"
    VALID = "valid"


class Activation(enum.Enum):
    RELU = "relu"
    LEAKY_RELU = "leaky_relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"
