#!/usr/bin/env python3
"""Regenerates the demo fixtures: catalog/, catalog.jsonl, lexicon.json, corpus.txt, eval_prompts.txt.

Output is a pure function of SEED, so rerunning leaves the tree unchanged.
"""

import json
import random
from pathlib import Path

SEED = 20231
HERE = Path(__file__).resolve().parent

LEXICON = {
    "categories": {
        "people": ["woman", "man", "girl", "boy", "person", "people", "portrait", "face", "child", "lady",
                   "warrior", "knight", "princess", "chef", "dancer", "musician", "soldier", "queen", "king",
                   "grandmother", "fisherman", "bride", "samurai", "student"],
        "animals": ["dog", "puppy", "cat", "kitten", "horse", "bird", "fox", "wolf", "lion", "tiger", "owl",
                    "rabbit", "bear", "deer", "fish", "whale", "butterfly", "animal", "pet", "corgi", "parrot",
                    "panda", "elephant", "otter"],
        "scenes": ["beach", "mountain", "forest", "city", "street", "lake", "river", "ocean", "sea", "sunset",
                   "castle", "village", "desert", "landscape", "skyline", "valley", "waterfall", "island",
                   "garden", "meadow", "harbor", "canyon", "scenery", "shore"],
        "photorealistic": ["photo", "photograph", "photography", "photorealistic", "realistic", "dslr", "35mm",
                           "bokeh", "8k", "hdr", "lens", "hyperrealistic", "raw", "film"],
        "anime": ["anime", "manga", "cartoon", "cel", "chibi", "kawaii", "ghibli", "toon", "2d", "shonen",
                  "shoujo", "lineart"],
        "general": ["abstract", "pattern", "geometric", "minimalist", "surreal", "collage", "mixed", "eclectic"],
    },
}

# (id, name, subject, style or None, free tags, popularity, base model)
CARDS = [
    ("portrait-realism-xl", "Portrait Realism XL", "people", "photorealistic", ["portrait", "studio"], 9100, "SDXL"),
    ("street-people-photo", "Street People Photo", "people", "photorealistic", ["street", "candid"], 4200, "SD1.5"),
    ("cinematic-faces", "Cinematic Faces", "people", "photorealistic", ["cinematic", "face"], 7600, "SDXL"),
    ("fashion-lens-v2", "Fashion Lens v2", "people", "photorealistic", ["fashion", "magazine"], 2800, "SD1.5"),
    ("anime-heroine-mix", "Anime Heroine Mix", "people", "anime", ["character", "heroine"], 12500, "SD1.5"),
    ("manga-ink-people", "Manga Ink People", "people", "anime", ["lineart", "monochrome"], 3100, "SD1.5"),
    ("chibi-friends", "Chibi Friends", "people", "anime", ["chibi", "cute"], 5400, "SD1.5"),
    ("eclectic-figures", "Eclectic Figures", "people", None, ["abstract", "figure"], 1900, "SD1.5"),
    ("wildlife-photo-pro", "Wildlife Photo Pro", "animals", "photorealistic", ["wildlife", "nature"], 8800, "SDXL"),
    ("pet-portrait-real", "Pet Portrait Real", "animals", "photorealistic", ["pet", "studio"], 6100, "SD1.5"),
    ("macro-fauna", "Macro Fauna", "animals", "photorealistic", ["macro", "insect"], 2300, "SD1.5"),
    ("kawaii-critters", "Kawaii Critters", "animals", "anime", ["cute", "mascot"], 10400, "SD1.5"),
    ("ghibli-beasts", "Ghibli Beasts", "animals", "anime", ["fantasy", "painterly"], 7300, "SD1.5"),
    ("toon-pets", "Toon Pets", "animals", "anime", ["cartoon", "pet"], 3900, "SD1.5"),
    ("seaside-realism", "Seaside Realism", "scenes", "photorealistic", ["beach", "coast", "seascape"], 3300, "SDXL"),
    ("landscape-photo-xl", "Landscape Photo XL", "scenes", "photorealistic", ["landscape", "mountain"], 11800, "SDXL"),
    ("urban-night-photo", "Urban Night Photo", "scenes", "photorealistic", ["city", "night"], 6900, "SD1.5"),
    ("anime-backgrounds", "Anime Backgrounds", "scenes", "anime", ["background", "sky"], 9700, "SD1.5"),
    ("manga-towns", "Manga Towns", "scenes", "anime", ["town", "lineart"], 2600, "SD1.5"),
    ("surreal-worlds", "Surreal Worlds", "scenes", None, ["surreal", "dreamlike"], 4800, "SD1.5"),
]

SUBJECT_PHRASES = {
    "people": ["a portrait of an old fisherman", "a young woman reading", "a samurai warrior in the rain",
               "a princess in a ball gown", "a street musician playing violin", "a smiling grandmother",
               "a chef tasting soup", "a dancer mid leap", "a knight in silver armor", "a boy flying a kite",
               "a bride with a veil", "a student at a desk", "a queen on her throne", "a soldier resting",
               "a girl with freckles", "a man in a raincoat", "a child blowing bubbles", "a lady with a parasol"],
    "animals": ["a golden retriever puppy", "a red fox in the snow", "a sleeping kitten", "an owl on a branch",
                "a galloping horse", "a lion at rest", "a tiger drinking water", "a rabbit in the grass",
                "a brown bear fishing", "a deer at dawn", "a humpback whale breaching", "a blue butterfly",
                "a corgi with a ball", "a parrot on a perch", "a panda eating bamboo", "an otter floating",
                "a wolf howling", "an elephant family"],
    "scenes": ["a quiet beach at dawn", "a sandy beach with palm trees", "a stormy ocean shore",
               "a mountain lake at sunset", "a misty pine forest", "a city skyline at night",
               "a narrow street in an old village", "a waterfall in a canyon", "a desert under stars",
               "a castle on a hill", "a harbor with fishing boats", "a flower meadow in spring",
               "a tropical island", "a river valley in autumn", "a japanese garden", "a beach at sunset"],
}

STYLE_PHRASES = {
    "photorealistic": ["dslr photo", "35mm film photograph", "photorealistic, 8k", "realistic photo, bokeh",
                       "hdr photography", "raw photo, 85mm lens"],
    "anime": ["anime style", "manga illustration", "cel shaded anime", "chibi cartoon", "anime key visual",
              "ghibli style anime"],
    None: ["abstract collage", "geometric pattern", "surreal mixed media", "minimalist abstract"],
}

QUALITY = ["highly detailed", "sharp focus", "soft lighting", "masterpiece", "best quality", "cinematic lighting",
           "intricate details", "vibrant colors", "award winning"]

PREFIXES = ["", "", "", "generate an image of ", "draw ", "i want to see ", "i would love to see "]


def prompt_for(rng, subject, style, quality_count):
    parts = [rng.choice(SUBJECT_PHRASES[subject]), rng.choice(STYLE_PHRASES[style])]
    parts += rng.sample(QUALITY, quality_count)
    return ", ".join(parts)


def card_json(rng, card):
    cid, name, subject, style, free, popularity, base = card
    examples = [prompt_for(rng, subject, style, 3) for _ in range(3)]
    return {
        "id": cid,
        "name": name,
        "subject_tags": [subject],
        "style_tags": [style] if style else [],
        "free_tags": free,
        "example_prompts": examples,
        "base_model": base,
        "popularity": popularity,
        "endpoint": None,
    }


def leaves():
    return sorted({(c[2], c[3]) for c in CARDS}, key=lambda leaf: (leaf[0], leaf[1] or ""))


def main():
    rng = random.Random(SEED)
    catalog_dir = HERE / "catalog"
    catalog_dir.mkdir(exist_ok=True)
    for old in catalog_dir.glob("*.json"):
        old.unlink()
    cards = [card_json(rng, card) for card in CARDS]
    for card in cards:
        (catalog_dir / f"{card['id']}.json").write_text(json.dumps(card, indent=2) + "\n")
    (HERE / "catalog.jsonl").write_text("".join(json.dumps(card) + "\n" for card in cards))
    (catalog_dir / "index.json").write_text(
        json.dumps({"version": 1, "cards": [c[0] for c in CARDS]}, indent=2) + "\n")
    (HERE / "lexicon.json").write_text(json.dumps(LEXICON, indent=2) + "\n")

    all_leaves = leaves()
    corpus = set()
    while len(corpus) < 200:
        subject, style = rng.choice(all_leaves)
        corpus.add(prompt_for(rng, subject, style, rng.randint(1, 3)))
    eval_prompts = []
    seen = set(corpus)
    while len(eval_prompts) < 100:
        subject, style = rng.choice(all_leaves)
        p = prompt_for(rng, subject, style, rng.randint(0, 2))
        if p in seen:
            continue
        seen.add(p)
        eval_prompts.append(rng.choice(PREFIXES) + p)
    (HERE / "corpus.txt").write_text("\n".join(sorted(corpus)) + "\n")
    (HERE / "eval_prompts.txt").write_text("\n".join(eval_prompts) + "\n")


if __name__ == "__main__":
    main()
