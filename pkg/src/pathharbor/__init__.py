"""PathHarbor: a vendor-neutral platform for AI image analysis in digital pathology.

Subpackages:
    model       shared domain vocabulary and validation logic
    slides      slide storage, pyramids, synthetic generation, tile/DICOMweb serving
    jobs        app registration, job lifecycle, scoped tokens, executors
    overlays    float-valued explainability overlays and colormapped rendering
    ats         app compliance test suite and reference fixture apps
    validation  batch validation campaigns with stratified reporting
"""

__version__ = "0.1.0"
