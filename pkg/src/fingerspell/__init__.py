"""Post-detector fingerspelling recognition: signing tubes, CTC and attention
decoding, language-model fusion and letter-accuracy evaluation."""

from .alphabet import ALPHABET, Alphabet, collapse
from .geometry import BoundingBox, FrameDetections, ScoredBox, iou, nms
from .tubes import LinkerConfig, SigningTube, best_tube, linking_score, tube_quality
from .ctc import (
    ctc_loss_grad,
    emissions,
    greedy_decode,
    label_log_prob,
    path_log_prob,
)
from .lm import NGramLM, UniformLM, lm_log_prob, perplexity, train_ngram
from .beam import BeamHypothesis, FusionConfig, beam_decode
from .metrics import (
    AlignmentCounts,
    EvalRecord,
    align,
    bucket_by_fps,
    confusion_stats,
    letter_accuracy,
)

__version__ = "0.1.0"
