"""On-disk formats of the pipeline artifacts."""
from morph4d.datamanager.data_manager import DataManager

__all__ = ['DataManager']
