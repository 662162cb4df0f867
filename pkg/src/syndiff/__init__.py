"""Cross-linguistic syntactic difference toolkit.

Measures the distance between languages as the optimal transport distance
between their labeled distributions of grammatical-relation vectors, relates
that measure to formal-syntax and typological distances, and ranks candidate
source languages for zero-shot cross-lingual transfer.
"""

__version__ = "0.1.0"

from .treebank import Treebank, parse_conllu, extract_relations
from .embeddings import (
    EmbeddingSet,
    LabeledDataset,
    assemble_dataset,
    load_dataset,
    read_embedding_file,
    relation_vector,
    save_dataset,
    write_embedding_file,
)
from .otdd import OtddConfig, OtddResult, dataset_distance, label_distance_matrix, sinkhorn
from .probe import ProbeModel, probe_accuracy, probe_sweep, train_probe
from .typology import (
    ParameterProfile,
    WalsProfile,
    average_feature_distance,
    feature_distance_vector,
    jaccard_distance,
    wals_feature_distance,
)
from .regress import (
    GbdtModel,
    cross_validate,
    fit_gbdt,
    impurity_importance,
    permutation_importance,
    predict,
    select_source,
)
from .analysis import (
    DistanceMatrix,
    TransferTable,
    agglomerative_cluster,
    compare_measures,
    las_drop,
    ndcg_at_k,
    pca_project,
    spearman,
)

__all__ = [name for name in dir() if not name.startswith("_")]
