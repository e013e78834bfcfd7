"""Training pipeline for the CVRP node-selector model."""

from .container import export_weights, import_weights
from .dataset import LabeledExample, build_dataset, load_dataset, make_labels
from .evaluate import base_rate, evaluate_precision
from .gradcheck import grad_check, grad_check_sweep
from .graphs import GraphBundle, build_training_graph, graph_from_dump, merge_graphs
from .model import SelectorNet
from .train import CurriculumStage, TrainConfig, TrainHistory, smoothed, train

__version__ = "0.1.0"
