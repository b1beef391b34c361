"""Phoneme-level alignment adapter.

Aligns transcript lines to the audio with a character-level CTC speech
model (forced alignment over the emission matrix), then expands each word's
span into dictionary phonemes spread uniformly across it.  The uniform
split is an approximation at phoneme granularity; word boundaries are
model-aligned.

Inputs: transcript JSON ({input}) and the audio ({audio} -> --audio); a
CMUdict-format pronunciation dictionary supplies the per-word phonemes.
Output: labels TSV ``start end phoneme word_index``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .common import AdapterManifest, fail, format_seconds, read_wav_mono

DEFAULT_MODEL = "facebook/wav2vec2-base-960h"

MANIFEST = AdapterManifest(
    stage="align",
    model=DEFAULT_MODEL,
    version=__version__,
    input_format="transcript-json@1",
    output_format="labels-tsv@1",
)


def ctc_forced_align(
    log_probs: np.ndarray, token_ids: list[int], blank_id: int
) -> list[tuple[int, int]]:
    """Frame span per token by Viterbi over a CTC trellis.

    ``log_probs`` is (frames, vocab) log-softmax output.  A frame either
    advances into the next token, repeats the current token, or emits blank;
    spans are the frames on which each token was actually emitted, returned
    half-open as (start_frame, end_frame).
    """
    frames = log_probs.shape[0]
    n = len(token_ids)
    if n == 0 or frames < n:
        raise ValueError(f"cannot align {n} tokens to {frames} frames")
    neg_inf = -np.inf
    tokens = np.asarray(token_ids)

    def stay_scores(t: int) -> np.ndarray:
        # staying in column j re-emits token j or a blank, whichever is likelier
        scores = np.full(n + 1, log_probs[t, blank_id])
        scores[1:] = np.maximum(scores[1:], log_probs[t, tokens])
        return scores

    trellis = np.full((frames + 1, n + 1), neg_inf)
    trellis[0, 0] = 0.0
    for t in range(frames):
        stay = trellis[t] + stay_scores(t)
        advance = np.full(n + 1, neg_inf)
        advance[1:] = trellis[t, :-1] + log_probs[t, tokens]
        trellis[t + 1] = np.maximum(stay, advance)
    if not np.isfinite(trellis[frames, n]):
        raise ValueError("no feasible alignment path")

    spans = [[frames, 0] for _ in range(n)]
    j = n
    for t in range(frames, 0, -1):
        token_lp = log_probs[t - 1, tokens[j - 1]] if j > 0 else neg_inf
        advance_score = trellis[t - 1, j - 1] + token_lp if j > 0 else neg_inf
        stay_score = trellis[t - 1, j] + stay_scores(t - 1)[j]
        if j > 0 and advance_score >= stay_score:
            spans[j - 1][0] = t - 1
            spans[j - 1][1] = max(spans[j - 1][1], t)
            j -= 1
        elif j > 0 and token_lp >= log_probs[t - 1, blank_id]:
            # stay that re-emitted the current token: part of its span
            spans[j - 1][0] = min(spans[j - 1][0], t - 1)
            spans[j - 1][1] = max(spans[j - 1][1], t)
    return [(start, max(end, start + 1)) for start, end in spans]


def load_pronunciations(path: Path) -> dict[str, list[str]]:
    """word -> first-variant phoneme tokens, CMUdict-format file."""
    table: dict[str, list[str]] = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        fields = line.split()
        if len(fields) < 2:
            continue
        head = fields[0].upper()
        word = head.split("(")[0]
        if word not in table:  # keep variant 0
            table[word] = fields[1:]
    return table


def normalize_word(token: str) -> str:
    return "".join(ch for ch in token.upper() if ch.isalpha() or ch == "'")


def word_rows(
    word: str,
    word_index: int,
    start_s: float,
    end_s: float,
    pronunciations: dict[str, list[str]],
) -> list[str]:
    phonemes = pronunciations.get(word)
    if phonemes is None:
        fail(f"word {word!r} missing from the pronunciation dictionary")
    boundaries = np.linspace(start_s, end_s, len(phonemes) + 1)
    rows = []
    previous = None
    for i, phoneme in enumerate(phonemes):
        lo = round(float(boundaries[i]), 6)
        hi = round(float(boundaries[i + 1]), 6)
        if previous is not None and lo < previous:
            lo = previous
        if hi <= lo:
            hi = round(lo + 1e-6, 6)
        previous = hi
        rows.append(f"{format_seconds(lo)}\t{format_seconds(hi)}\t{phoneme}\t{word_index}")
    return rows


def align(
    transcript_path: Path,
    audio_path: Path,
    dict_path: Path,
    model_name: str,
    device: str,
) -> str:
    try:
        data = json.loads(transcript_path.read_text(encoding="utf-8"))
        lines = [entry["text"] for entry in data["lines"]]
    except (OSError, KeyError, ValueError) as exc:
        fail(f"cannot read transcript {transcript_path}: {exc}")
    pronunciations = load_pronunciations(dict_path)
    samples, rate = read_wav_mono(audio_path)
    try:
        import torch
        from transformers import Wav2Vec2ForCTC, Wav2Vec2Processor
    except ImportError as exc:
        fail(f"transformers/torch are required for the align adapter: {exc}")
    try:
        processor = Wav2Vec2Processor.from_pretrained(model_name)
        model = Wav2Vec2ForCTC.from_pretrained(model_name).to(device)
    except Exception as exc:
        fail(f"cannot load alignment model {model_name!r}: {exc}")
    model.eval()
    inputs = processor(
        samples, sampling_rate=rate, return_tensors="pt"
    ).input_values.to(device)
    with torch.no_grad():
        logits = model(inputs).logits[0]
    log_probs = torch.log_softmax(logits, dim=-1).cpu().numpy()

    vocab = processor.tokenizer.get_vocab()
    blank_id = vocab[processor.tokenizer.pad_token]
    delimiter = vocab.get("|", None)

    words = [normalize_word(w) for line in lines for w in line.split()]
    words = [w for w in words if w]
    if not words:
        fail("transcript contains no words to align")
    token_ids: list[int] = []
    token_word: list[int] = []  # word index of each token, -1 for delimiters
    for word_index, word in enumerate(words):
        if word_index and delimiter is not None:
            token_ids.append(delimiter)
            token_word.append(-1)
        for ch in word:
            if ch not in vocab:
                fail(f"character {ch!r} of word {word!r} not in model vocabulary")
            token_ids.append(vocab[ch])
            token_word.append(word_index)
    try:
        spans = ctc_forced_align(log_probs, token_ids, blank_id)
    except ValueError as exc:
        fail(f"forced alignment failed: {exc}")

    seconds_per_frame = (len(samples) / rate) / log_probs.shape[0]
    word_spans: dict[int, list[float]] = {}
    for (start_frame, end_frame), owner in zip(spans, token_word):
        if owner < 0:
            continue
        start_s = start_frame * seconds_per_frame
        end_s = end_frame * seconds_per_frame
        if owner not in word_spans:
            word_spans[owner] = [start_s, end_s]
        else:
            word_spans[owner][1] = end_s

    rows = []
    for word_index, word in enumerate(words):
        start_s, end_s = word_spans[word_index]
        rows.extend(word_rows(word, word_index, start_s, end_s, pronunciations))
    return "\n".join(rows) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sv2svt-adapter-align", description=__doc__)
    parser.add_argument("input", nargs="?", help="input transcript JSON")
    parser.add_argument("output", nargs="?", help="output labels TSV")
    parser.add_argument("--manifest", action="store_true")
    parser.add_argument("--audio", help="the audio file being aligned")
    parser.add_argument("--dict", help="CMUdict-format pronunciation dictionary")
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    if not args.input or not args.output or not args.audio or not args.dict:
        parser.error("input, output, --audio and --dict are required")
    text = align(
        Path(args.input), Path(args.audio), Path(args.dict), args.model, args.device
    )
    Path(args.output).write_text(text, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
