"""Length-biased translation adapter wrapping an NLLB-style model.

Reads one English line, generates Japanese beam candidates biased toward
fewer tokens than the target syllable count (a kanji never yields less than
one syllable), and writes candidates JSON with the beam scores.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .common import AdapterManifest, canonical_json, fail

DEFAULT_MODEL = "facebook/nllb-200-distilled-600M"
SOURCE_LANG = "eng_Latn"
TARGET_LANG = "jpn_Jpan"

MANIFEST = AdapterManifest(
    stage="translate",
    model=DEFAULT_MODEL,
    version=__version__,
    input_format="line-text",
    output_format="candidates-json@1",
)


def generate_candidates(
    text: str,
    target_syllables: int,
    model_name: str,
    beams: int,
    length_penalty: float,
    token_margin: int,
    device: str,
) -> list[dict]:
    try:
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    except ImportError as exc:
        fail(f"transformers/torch are required for the translate adapter: {exc}")
    try:
        tokenizer = AutoTokenizer.from_pretrained(model_name, src_lang=SOURCE_LANG)
        model = AutoModelForSeq2SeqLM.from_pretrained(model_name).to(device)
    except Exception as exc:
        fail(f"cannot load translation model {model_name!r}: {exc}")
    model.eval()
    target_id = tokenizer.convert_tokens_to_ids(TARGET_LANG)
    inputs = tokenizer(text, return_tensors="pt").to(device)
    # cap generation near the syllable budget and prefer shorter beams:
    # every kanji costs at least one syllable, so shorter token counts are
    # the ones that can still fit
    max_new = max(4, target_syllables + token_margin)
    with torch.no_grad():
        generated = model.generate(
            **inputs,
            forced_bos_token_id=target_id,
            num_beams=beams,
            num_return_sequences=beams,
            length_penalty=length_penalty,
            max_new_tokens=max_new,
            output_scores=True,
            return_dict_in_generate=True,
            early_stopping=True,
        )
    texts = tokenizer.batch_decode(generated.sequences, skip_special_tokens=True)
    scores = [float(s) for s in generated.sequences_scores]
    seen = set()
    candidates = []
    for candidate_text, score in zip(texts, scores):
        candidate_text = candidate_text.strip()
        if not candidate_text or candidate_text in seen:
            continue
        if not math.isfinite(score):
            continue
        seen.add(candidate_text)
        candidates.append({"text": candidate_text, "score": score})
    if not candidates:
        fail("beam search produced no usable candidate")
    return candidates


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sv2svt-adapter-translate", description=__doc__
    )
    parser.add_argument("input", nargs="?", help="input line text file")
    parser.add_argument("output", nargs="?", help="output candidates JSON")
    parser.add_argument("target_syllables", nargs="?", type=int)
    parser.add_argument("--manifest", action="store_true")
    parser.add_argument("--model", default=DEFAULT_MODEL)
    parser.add_argument("--beams", type=int, default=50,
                        help="as many beams as memory allows")
    parser.add_argument("--length-penalty", type=float, default=0.6)
    parser.add_argument("--token-margin", type=int, default=4)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.manifest:
        MANIFEST.emit()
        return 0
    if not args.input or not args.output or args.target_syllables is None:
        parser.error("input, output and target_syllables are required")
    if args.target_syllables < 1:
        parser.error("target_syllables must be >= 1")
    if args.beams < 1:
        parser.error("--beams must be >= 1")
    text = Path(args.input).read_text(encoding="utf-8").strip()
    if not text:
        candidates = [{"text": "", "score": 0.0, "flags": ["empty"]}]
    else:
        candidates = generate_candidates(
            text,
            args.target_syllables,
            args.model,
            args.beams,
            args.length_penalty,
            args.token_margin,
            args.device,
        )
    document = canonical_json(
        {
            "schema_version": "1",
            "target_syllables": args.target_syllables,
            "candidates": candidates,
        }
    )
    Path(args.output).write_text(document, encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
