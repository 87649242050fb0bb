#!/usr/bin/env python3
"""Generate the bundled toy dataset: two noisy views of one small film world.

Writes kb1_attrs.tsv, kb1_rels.tsv, kb2_attrs.tsv, kb2_rels.tsv, gold.tsv,
workers.tsv and manifest.json into the output directory (default data/toy).
"""

import argparse
import datetime as dt
import json
import random
from pathlib import Path

FIRST = [
    "John", "Mary", "Robert", "Linda", "James", "Susan", "Michael", "Karen", "David", "Nancy",
    "Thomas", "Helen", "Daniel", "Laura", "Peter", "Anna", "George", "Clara", "Henry", "Alice",
    "Oscar", "Greta", "Victor", "Irene", "Walter", "Edith", "Hugo", "Vera", "Felix", "Nora",
]
LAST = [
    "Allen", "Baxter", "Carver", "Dalton", "Ellison", "Fenwick", "Garrett", "Holloway", "Ingram",
    "Jarvis", "Kendall", "Lowell", "Mercer", "Norwood", "Ogden", "Pryor", "Quinlan", "Radford",
    "Sutton", "Thorne", "Underhill", "Vance", "Whitlock", "Yardley", "Ashby", "Bramwell",
    "Crowley", "Dunmore", "Everly", "Fairbanks", "Gillespie", "Hartigan", "Iverson", "Keating",
    "Langley", "Montague", "Nightingale", "Orwell", "Pemberton", "Rutherford",
]
CITY = [
    "Port Alder", "Riverton", "Eastmoor", "Stonebridge", "Halvard", "Kestrel Bay", "Marlowe",
    "Ashford Vale", "Greywater", "Lindenau", "Corvel", "Brightwick", "Oakhaven", "Saltmere",
    "Vellmar", "Thistledown", "Rookfield", "Emberly", "Dunhollow", "Westcliff", "Norhaven",
    "Pellworth", "Quarry Hill", "Sablemoor", "Tarrow",
]
COUNTRY = ["Aldoria", "Bremland", "Castavia", "Delmora", "Estvale"]
ADJ = [
    "Silent", "Crimson", "Hidden", "Broken", "Golden", "Distant", "Frozen", "Burning", "Hollow",
    "Restless", "Velvet", "Wandering", "Iron", "Paper", "Midnight", "Savage", "Gentle", "Lost",
]
NOUN = [
    "Harbor", "Garden", "Crown", "Mirror", "River", "Lantern", "Kingdom", "Promise", "Winter",
    "Compass", "Orchard", "Letter", "Shadow", "Voyage", "Tower", "Signal", "Cradle", "Meadow",
]
GENRE = ["drama", "comedy", "thriller", "western", "musical", "documentary", "romance"]


def iso(days):
    return (dt.date(1900, 1, 1) + dt.timedelta(days=days)).isoformat()


def build_world(rng):
    cities, persons, films = [], [], []
    for i, name in enumerate(CITY):
        cities.append({"key": f"city{i}", "type": "city", "label": name,
                       "population": rng.randrange(20_000, 2_000_000),
                       "country": rng.choice(COUNTRY)})

    names = set()
    while len(persons) < 110:
        name = f"{rng.choice(FIRST)} {rng.choice(LAST)}"
        if name in names:
            continue
        names.add(name)
        persons.append({"key": f"person{len(persons)}", "type": "person", "label": name,
                        "birth": rng.randrange(365 * 20, 365 * 90)})
    # homonyms: distinct people sharing a full name
    for src in rng.sample(persons, 5):
        persons.append({"key": f"person{len(persons)}", "type": "person",
                        "label": src["label"], "birth": rng.randrange(365 * 20, 365 * 90)})

    titles = set()
    while len(films) < 64:
        title = f"The {rng.choice(ADJ)} {rng.choice(NOUN)}"
        if title in titles:
            continue
        titles.add(title)
        films.append({"key": f"film{len(films)}", "type": "film", "label": title,
                      "release": rng.randrange(365 * 40, 365 * 120),
                      "runtime": rng.randrange(80, 180), "genre": rng.choice(GENRE)})
    # remakes: same title, different film
    for src in rng.sample(films, 4):
        films.append({"key": f"film{len(films)}", "type": "film", "label": src["label"],
                      "release": rng.randrange(365 * 40, 365 * 120),
                      "runtime": rng.randrange(80, 180), "genre": rng.choice(GENRE)})

    isolated = set(p["key"] for p in rng.sample(persons, 10))
    connected = [p for p in persons if p["key"] not in isolated]
    directors = rng.sample(connected, 24)
    facts = []  # (head, relation kind, tail)
    for p in connected:
        facts.append((p["key"], "born_in", rng.choice(cities)["key"]))
    for f in films:
        facts.append((f["key"], "directed_by", rng.choice(directors)["key"]))
        for a in rng.sample(connected, rng.randint(2, 4)):
            facts.append((f["key"], "starring", a["key"]))
        for c in rng.sample(cities, rng.randint(1, 2)):
            facts.append((f["key"], "shot_in", c["key"]))
    return cities + persons + films, sorted(set(facts)), isolated


KB1_ATTRS = {"label": "label", "birth": "birth_date", "population": "population",
             "country": "country", "release": "release_date", "runtime": "runtime",
             "genre": "genre"}
KB2_ATTRS = {"label": "name", "birth": "born", "population": "inhabitants",
             "country": "nation", "release": "premiere", "runtime": "duration",
             "genre": "category"}
KB1_RELS = {"born_in": ("born_in", "birthplace_of"), "directed_by": ("directed_by", "directed"),
            "starring": ("starring", "acted_in"), "shot_in": ("shot_in", "location_of")}
KB2_RELS = {"born_in": ("birthPlace", "isBirthPlaceOf"), "directed_by": ("director", "directorOf"),
            "starring": ("actor", "actedIn"), "shot_in": ("filmedIn", "filmingLocationOf")}
KINDS = {"label": "string", "birth": "date", "population": "number", "country": "string",
         "release": "date", "runtime": "number", "genre": "string"}


def typo(rng, word):
    if len(word) < 4:
        return word
    i = rng.randrange(1, len(word) - 2)
    return word[:i] + word[i + 1] + word[i] + word[i + 2:]


def noisy_label(rng, e):
    label = e["label"]
    r = rng.random()
    if e["type"] == "person":
        first, last = label.split(" ", 1)
        if r < 0.08:
            return f"{first[0]}. {last}"
        if r < 0.14:
            return f"{first} {typo(rng, last)}"
    elif e["type"] == "film" and r < 0.06:
        return label.removeprefix("The ")
    return label


def values(e, rng, noisy):
    out = {}
    for field in ("label", "birth", "population", "country", "release", "runtime", "genre"):
        if field not in e:
            continue
        v = e[field]
        if noisy and field != "label" and rng.random() < 0.1:
            continue  # missing value
        if field == "label":
            v = noisy_label(rng, e) if noisy else v
        elif field in ("birth", "release"):
            if noisy and rng.random() < 0.05:
                v += rng.choice([-1, 1]) * 365
            v = iso(v)
        elif field == "population":
            v = int(v * (1 + rng.uniform(-0.02, 0.02))) if noisy else v
        elif field == "runtime":
            v = v + rng.choice([-2, -1, 0, 0, 1, 2]) if noisy else v
        out[field] = str(v)
    return out


def emit(world, facts, ids, attr_names, rel_names, rng, noisy, drop_rel):
    attrs, rels = [], []
    for e in world:
        if e["key"] not in ids:
            continue
        for field, v in values(e, rng, noisy).items():
            attrs.append((ids[e["key"]], attr_names[field], v, KINDS[field]))
    for h, kind, t in facts:
        if h not in ids or t not in ids:
            continue
        if rng.random() < drop_rel:
            continue
        fwd, inv = rel_names[kind]
        rels.append((ids[h], fwd, ids[t]))
        rels.append((ids[t], inv, ids[h]))
    return sorted(set(attrs)), sorted(set(rels))


def make_ids(rng, keys, prefix):
    keys = list(keys)
    rng.shuffle(keys)
    return {k: f"{prefix}{i:04d}" for i, k in enumerate(keys)}


def counts(attrs, rels):
    ents = {a[0] for a in attrs} | {r[0] for r in rels} | {r[2] for r in rels}
    return {"entities": len(ents), "attributes": len({a[1] for a in attrs}),
            "relations": len({r[1] for r in rels}), "attr_triples": len(attrs),
            "rel_triples": len(rels)}


def write_tsv(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write("\t".join(row) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "toy"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    world, facts, isolated = build_world(rng)
    keys = [e["key"] for e in world]
    in1 = [k for k in keys if k in isolated or rng.random() < 0.95]
    in2 = [k for k in keys if k in isolated or rng.random() < 0.92]
    ids1 = make_ids(rng, in1, "y:")
    ids2 = make_ids(rng, in2, "d:")

    attrs1, rels1 = emit(world, facts, ids1, KB1_ATTRS, KB1_RELS, rng, False, 0.0)
    attrs2, rels2 = emit(world, facts, ids2, KB2_ATTRS, KB2_RELS, rng, True, 0.06)
    gold = sorted((ids1[k], ids2[k]) for k in keys if k in ids1 and k in ids2)

    write_tsv(out / "kb1_attrs.tsv", attrs1)
    write_tsv(out / "kb1_rels.tsv", rels1)
    write_tsv(out / "kb2_attrs.tsv", attrs2)
    write_tsv(out / "kb2_rels.tsv", rels2)
    write_tsv(out / "gold.tsv", gold)
    write_tsv(out / "workers.tsv",
              [("sim1", "simulated", "0.1"), ("sim2", "simulated", "0.1"),
               ("sim3", "simulated", "0.2"), ("sim4", "simulated", "0.2"),
               ("sim5", "simulated", "0.25")])
    types = sorted({e["type"] for e in world})
    manifest = {"seed": args.seed, "types": types, "kb1": counts(attrs1, rels1),
                "kb2": counts(attrs2, rels2), "gold": len(gold),
                "label_attr1": KB1_ATTRS["label"], "label_attr2": KB2_ATTRS["label"]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
