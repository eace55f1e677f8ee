"""Per-word embedding export from pretrained encoders to EMB1 files."""

from embed_export.exporter import ExportResult, ExportSpec, export
from embed_export.wire import EMB_MAGIC, EmbeddingWriter, sentence_id_hash

__version__ = "0.1.0"
