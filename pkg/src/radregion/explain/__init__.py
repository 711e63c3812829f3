from radregion.explain.embeddings import export_embeddings
from radregion.explain.gradcam import AttributionMap, ClassifierModel, guided_gradcam, heatmap_mass_fraction

__all__ = [
    "AttributionMap",
    "ClassifierModel",
    "guided_gradcam",
    "heatmap_mass_fraction",
    "export_embeddings",
]
