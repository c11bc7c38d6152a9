"""Two-stage EDS parsing: concept tagging, then arc scoring with connected decoding."""
from .config import TrainConfig
from .corpus import Instance, Sentence, Token, load_corpus
from .graph import EdsEdge, EdsGraph, EdsNode, parse_eds, serialize_eds
from .pipeline import Parser, train_parser
from .smatch import corpus_smatch, smatch

__version__ = "0.1.0"
