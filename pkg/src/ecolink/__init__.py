"""ecolink: link bill-of-materials components to life-cycle-assessment
activities and aggregate product carbon footprints."""

__version__ = "0.1.0"
