"""Self-contained synthetic demo corpus.

Generates a small BOM, an LCA database, datasheets, gold labels and canned
chat fixtures so the full pipeline and every test run offline. The corpus
is engineered, not measured: gold labels and canned responses are written
so that, under the local-hash embedder, semantic-only retrieval scores
strictly lower Hits@5 than the datasheet-assisted mode. It demonstrates
the harness; it does not claim real-world accuracy. Emission factors are
synthetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from ecolink import docmatch, llm
from ecolink.embedding import LocalHashEmbedder
from ecolink.ingest import (
    GoldLabel,
    write_bom,
    write_datasheets,
    write_gold_labels,
    write_lca_db,
)
from ecolink.model import BomEntry, Datasheet, LcaActivity

DEMO_SEED = 42
_DATASHEET_THRESHOLD = 0.5
_EMBED_DIM = 256

_BOM_ROWS = [
    # id, name, material, supplier, quantity
    ("c1", "SPIRALGEHÄUSE", "EN-GJL-250/A48 CL 35B", "Mechatronik GmbH", 1.0),
    ("c2", "WELLE", "C45+N", "Technikbau AG", 1.0),
    ("c3", "SPALTRING", "JL/GUSSEISEN LAMELLENGRAFIT", "GussForm Solutions", 2.0),
    ("c4", "SPANNRING", "STAHL+KATAPHORESE", "StahlPro Engineering", 1.0),
    ("c5", "SPALTRING", "JL/GUSSEISEN LAMELLENGRAFIT", "GussTech Industries", 2.0),
    ("c6", "STIFTSCHRAUBE", "8.8", "FixFast Components", 12.0),
    ("c7", "STIFTSCHRAUBE", "8.8", "SchraubenWerk AG", 8.0),
    ("c8", "STIFTSCHRAUBE", "5.8+A2A", "PrecisionParts GmbH", 4.0),
]

_STEEL_EAF_DESCRIPTION = (
    "This process models the production of steel using an electric arc furnace (EAF) "
    "within the European Union. The process includes the melting of recycled steel "
    "scrap and the subsequent refinement to meet industry-grade specifications. "
    "Electricity consumption and emissions are based on averages from EU-wide data. "
    "Additional inputs include limestone for slag formation and oxygen for "
    "decarburization. Outputs include steel billets ready for further processing and "
    "slag as a by-product for use in construction applications.\n\n"
    "This dataset represents a cradle-to-gate assessment, capturing the production of "
    "steel billets up to the point of factory gate, excluding downstream processing "
    "(e.g., rolling or shaping). Energy mix and emission profiles align with EU 27 "
    "averages for 2023."
)

_ACTIVITY_ROWS = [
    # id, name, description, unit
    ("a01", "Steel production, electric arc furnace, EU", _STEEL_EAF_DESCRIPTION, "kg CO2e/kg"),
    (
        "a02",
        "Cast iron production, grey, lamellar graphite",
        "Production of grey cast iron with lamellar graphite structure (EN-GJL grades) "
        "by melting pig iron and steel scrap in cupola and induction furnaces, followed "
        "by sand casting into housings, rings and machine parts. Includes mould "
        "preparation, pouring, shake-out and fettling of the castings.",
        "kg CO2e/kg",
    ),
    (
        "a03",
        "Cathodic dip coating, steel parts",
        "Electrophoretic deposition of an epoxy primer onto steel parts in a cathodic "
        "dip paint bath (KTL/Kataphorese), followed by curing in a convection oven. "
        "Covers bath chemicals, electricity and waste water treatment for corrosion "
        "protection of clamping rings, brackets and pressed parts.",
        "kg CO2e/m2",
    ),
    (
        "a04",
        "Fastener production, steel, cold heading",
        "Cold heading and thread rolling of carbon steel wire into bolts, studs and "
        "screws of property classes 4.8 to 10.9. Includes wire drawing, forming "
        "presses, quench and temper heat treatment for grade 8.8 fasteners, and "
        "washing before packaging.",
        "kg CO2e/kg",
    ),
    (
        "a05",
        "Zinc electroplating, steel fasteners",
        "Electrolytic deposition of a zinc layer on steel fasteners in alkaline baths, "
        "with blue passivation and drying (plating codes A2A and similar). Includes "
        "anode zinc, bath chemistry and rinse water treatment for corrosion-protected "
        "studs and screws.",
        "kg CO2e/kg",
    ),
    (
        "a06",
        "Steel hot rolling, bar and rod",
        "Reheating of cast steel billets and hot rolling into round bar and wire rod "
        "on a continuous mill. Includes furnace fuel, rolling electricity, scale "
        "losses and roll wear.",
        "kg CO2e/kg",
    ),
    (
        "a07",
        "Steel strip cold rolling",
        "Cold reduction of hot-rolled steel strip to final gauge on a tandem mill, "
        "with intermediate annealing and temper rolling. Typical precursor for formed "
        "rings, clamps and deep-drawn parts.",
        "kg CO2e/kg",
    ),
    (
        "a08",
        "Forging, steel, closed die",
        "Closed-die forging of steel billets into near-net-shape parts on mechanical "
        "presses, including induction heating, die wear, trimming and controlled "
        "cooling.",
        "kg CO2e/kg",
    ),
    (
        "a09",
        "Machining, turning, steel workpiece",
        "CNC turning of normalized carbon steel bar (for example C45+N) into shafts "
        "and axles, including cutting fluids, tool wear, machine electricity and chip "
        "recycling credit.",
        "kg CO2e/kg",
    ),
    (
        "a10",
        "Aluminium die casting",
        "High-pressure die casting of secondary aluminium alloys into thin-walled "
        "housings, including melting, dosing, casting cell energy and trimming scrap "
        "recirculation.",
        "kg CO2e/kg",
    ),
    (
        "a11",
        "Stainless steel production, electric arc furnace and AOD",
        "Melting of stainless scrap and ferroalloys in an electric arc furnace with "
        "argon oxygen decarburization refining, cast into slabs. Chromium and nickel "
        "inputs dominate the footprint.",
        "kg CO2e/kg",
    ),
    (
        "a12",
        "Ductile iron casting, spheroidal graphite",
        "Production of ductile cast iron (EN-GJS grades) with magnesium treatment for "
        "spheroidal graphite, sand cast into safety-relevant parts such as hubs and "
        "brackets.",
        "kg CO2e/kg",
    ),
    (
        "a13",
        "Injection moulding, thermoplastics",
        "Injection moulding of technical thermoplastics into housings and clips, "
        "including drying, plastication electricity, cooling water and runner "
        "regrind.",
        "kg CO2e/kg",
    ),
    (
        "a14",
        "Polypropylene production, film or sheet",
        "Polymerization of propylene and extrusion into polypropylene film or sheet, "
        "including catalyst, extrusion energy and edge trim recycling.",
        "kg CO2e/kg",
    ),
    (
        "a15",
        "Polyester film production, coating",
        "Transformation of ethylene glycol and terephthalic acid into polyethylene "
        "terephthalate (PET) film with an applied polyester-based coating layer.",
        "kg CO2e/kg",
    ),
    (
        "a16",
        "Non-woven production, synthetic fibres",
        "Web formation and bonding of synthetic fibres into non-woven fabric with a "
        "synthetic resin applied in water dispersion, dried and wound.",
        "kg CO2e/kg",
    ),
    (
        "a17",
        "Rubber gasket production, EPDM",
        "Compounding and compression moulding of EPDM rubber into sealing gaskets, "
        "including mixing energy, vulcanization and flash removal.",
        "kg CO2e/kg",
    ),
    (
        "a18",
        "Copper wire drawing",
        "Drawing of copper rod into fine wire with intermediate annealing and "
        "lubricant emulsions, for windings and connectors.",
        "kg CO2e/kg",
    ),
    (
        "a19",
        "Powder coating, steel surfaces",
        "Electrostatic application of polyester epoxy powder onto steel surfaces with "
        "oven curing, including pretreatment degreasing and overspray recovery.",
        "kg CO2e/m2",
    ),
    (
        "a20",
        "Hot-dip galvanizing, structural steel",
        "Immersion of structural steel parts in molten zinc after pickling and "
        "fluxing, forming a metallurgically bonded coating for outdoor corrosion "
        "protection.",
        "kg CO2e/kg",
    ),
    (
        "a21",
        "Sand mould preparation, green sand",
        "Preparation of green sand moulds for iron casting, including bentonite, sea "
        "coal, sand reclamation and moulding line electricity.",
        "kg CO2e/kg",
    ),
    (
        "a22",
        "Sintering, powder metallurgy parts",
        "Pressing of iron powder blends and sintering in belt furnaces under "
        "protective atmosphere, for small gears and structural parts.",
        "kg CO2e/kg",
    ),
    (
        "a23",
        "Screw machining, automatic lathe, brass",
        "High-volume turning of brass bar on cam-driven automatic lathes into turned "
        "parts and fittings, with swarf recovery.",
        "kg CO2e/kg",
    ),
    (
        "a24",
        "Heat treatment, quench and temper, steel",
        "Austenitizing, oil quenching and tempering of steel parts to target hardness, "
        "including furnace energy and quenchant losses.",
        "kg CO2e/kg",
    ),
    (
        "a25",
        "Industrial electricity mix, medium voltage, EU",
        "Supply of medium-voltage electricity from the EU consumption mix, including "
        "generation, transmission losses and grid infrastructure.",
        "kg CO2e/kWh",
    ),
]

_GOLD = {
    "c1": "a02",
    "c2": "a01",
    "c3": "a02",
    "c4": "a03",
    "c5": "a02",
    "c6": "a04",
    "c7": "a04",
    "c8": "a05",
}

# Datasheets exist for a subset of components only, like real supplier pools.
# Bodies repeat the component fields the way real datasheets repeat product
# names in headers and tables; that repetition is what pushes the match
# score over the selection threshold.
_DATASHEETS = {
    "c1": (
        "spiralgehaeuse_en-gjl-250.txt",
        "SPIRALGEHÄUSE EN-GJL-250/A48 CL 35B\n"
        "Mechatronik GmbH · Werkstoffdatenblatt SPIRALGEHÄUSE\n"
        "Werkstoff: EN-GJL-250/A48 CL 35B — Grauguss, Gusseisen mit Lamellengrafit\n"
        "Lieferant: Mechatronik GmbH\n"
        "Grey cast iron with lamellar graphite, sand cast spiral pump housing "
        "SPIRALGEHÄUSE, material EN-GJL-250/A48 CL 35B.\n"
        "Zugfestigkeit 250 N/mm², Härte 180–220 HB, Gefüge: Lamellengrafit.\n",
    ),
    "c2": (
        "welle_c45n_technikbau.txt",
        "WELLE C45+N\n"
        "Technikbau AG · Werkstoffdatenblatt WELLE\n"
        "Werkstoff: C45+N — unlegierter Vergütungsstahl, normalisiert (+N)\n"
        "Lieferant: Technikbau AG\n"
        "Drive shaft WELLE machined from normalized carbon steel C45+N bar, "
        "steel melted in an electric arc furnace from recycled scrap.\n"
        "Zugfestigkeit 560–710 N/mm², Lieferzustand +N (normalgeglüht).\n",
    ),
    "c4": (
        "spannring_stahl_kataphorese.txt",
        "SPANNRING STAHL+KATAPHORESE\n"
        "StahlPro Engineering · Datenblatt SPANNRING\n"
        "Werkstoff: STAHL+KATAPHORESE — Stahl mit kathodischer Tauchlackierung\n"
        "Lieferant: StahlPro Engineering\n"
        "Clamping ring SPANNRING, steel with cathodic dip paint coating "
        "(KTL/Kataphorese), epoxy primer cured in a convection oven.\n"
        "Schichtdicke 18–25 µm, Korrosionsschutz 720 h Salzsprühtest.\n",
    ),
    "c8": (
        "stiftschraube_5-8_a2a.txt",
        "STIFTSCHRAUBE 5.8+A2A\n"
        "PrecisionParts GmbH · Datenblatt STIFTSCHRAUBE\n"
        "Werkstoff: 5.8+A2A — Stahl Festigkeitsklasse 5.8, verzinkt A2A\n"
        "Lieferant: PrecisionParts GmbH\n"
        "Stud bolt STIFTSCHRAUBE property class 5.8, zinc electroplated finish "
        "A2A with blue passivation for corrosion protection.\n"
        "Gewinde M8–M16, Oberfläche: galvanisch verzinkt (A2A).\n",
    ),
}

# Canned chat responses per component: without datasheet context, and (for
# components that have a datasheet) with it. The no-context responses for
# c4 and c8 deliberately describe a plausible but wrong process, mirroring
# how ambiguous material codes mislead guesses without the datasheet.
_RESPONSES_NO_DATASHEET = {
    "c1": (
        "Activity name: Cast iron production, grey, lamellar graphite\n"
        "Activity information:\n"
        "EN-GJL-250 denotes grey cast iron with lamellar graphite. The spiral housing "
        "is assumed to be sand cast: pig iron and steel scrap are melted in cupola or "
        "induction furnaces, poured into sand moulds, then shake-out and fettling of "
        "the castings finish the part."
    ),
    "c2": (
        "Activity name: Steel production, electric arc furnace, EU\n"
        "Activity information:\n"
        "C45+N is a normalized carbon steel. The shaft blank is assumed to come from "
        "steel produced in an electric arc furnace (EAF): melting of recycled steel "
        "scrap with limestone for slag formation and oxygen for decarburization, cast "
        "into steel billets ready for further processing into bar."
    ),
    "c3": (
        "Activity name: Cast iron production, grey, lamellar graphite\n"
        "Activity information:\n"
        "GUSSEISEN LAMELLENGRAFIT is grey cast iron with lamellar graphite (JL/EN-GJL "
        "grade). The split ring is produced by melting pig iron and steel scrap in "
        "cupola and induction furnaces and sand casting into rings, with mould "
        "preparation, pouring, shake-out and fettling."
    ),
    "c4": (
        "Activity name: Steel strip cold rolling\n"
        "Activity information:\n"
        "STAHL indicates a plain steel part; the clamping ring is assumed to be formed "
        "from cold-rolled steel strip: cold reduction of hot-rolled strip to final "
        "gauge on a tandem mill with intermediate annealing and temper rolling before "
        "ring forming."
    ),
    "c5": (
        "Activity name: Cast iron production, grey, lamellar graphite\n"
        "Activity information:\n"
        "JL/GUSSEISEN LAMELLENGRAFIT identifies grey cast iron with lamellar graphite. "
        "Production melts pig iron and steel scrap in cupola and induction furnaces "
        "and sand casts the split rings, including mould preparation, pouring, "
        "shake-out and fettling of the castings."
    ),
    "c6": (
        "Activity name: Fastener production, steel, cold heading\n"
        "Activity information:\n"
        "Property class 8.8 marks a high-strength steel stud. Carbon steel wire is "
        "cold headed and thread rolled into studs and screws, with wire drawing, "
        "forming presses and quench and temper heat treatment for grade 8.8 "
        "fasteners, then washing before packaging."
    ),
    "c7": (
        "Activity name: Fastener production, steel, cold heading\n"
        "Activity information:\n"
        "An 8.8 stud bolt is made from carbon steel wire by cold heading and thread "
        "rolling into bolts, studs and screws, including wire drawing, forming "
        "presses and quench and temper heat treatment for grade 8.8 fasteners."
    ),
    "c8": (
        "Activity name: Fastener production, steel, cold heading\n"
        "Activity information:\n"
        "Property class 5.8 marks a medium-strength steel stud. Carbon steel wire is "
        "cold headed and thread rolled into studs and screws of property classes 4.8 "
        "to 10.9, then washed before packaging; the A2A suffix is assumed to be a "
        "thread tolerance note."
    ),
}

_RESPONSES_WITH_DATASHEET = {
    "c1": (
        "Activity name: Cast iron production, grey, lamellar graphite\n"
        "Activity information:\n"
        "The datasheet confirms grey cast iron with lamellar graphite structure "
        "(EN-GJL-250). The housing is sand cast: melting pig iron and steel scrap in "
        "cupola and induction furnaces, pouring into sand moulds prepared for "
        "housings and rings, then shake-out and fettling of the castings."
    ),
    "c2": (
        "Activity name: Steel production, electric arc furnace, EU\n"
        "Activity information:\n"
        "The datasheet states the C45+N shaft is machined from bar of steel melted in "
        "an electric arc furnace from recycled scrap. Production of steel in an "
        "electric arc furnace (EAF) within the European Union: melting of recycled "
        "steel scrap, refinement to industry-grade specifications, limestone for slag "
        "formation and oxygen for decarburization, output as steel billets."
    ),
    "c4": (
        "Activity name: Cathodic dip coating, steel parts\n"
        "Activity information:\n"
        "The datasheet specifies KATAPHORESE: cathodic dip paint coating of the steel "
        "clamping ring. Electrophoretic deposition of an epoxy primer in a cathodic "
        "dip paint bath (KTL/Kataphorese), cured in a convection oven, covering bath "
        "chemicals, electricity and waste water treatment for corrosion protection."
    ),
    "c8": (
        "Activity name: Zinc electroplating, steel fasteners\n"
        "Activity information:\n"
        "The datasheet decodes A2A as a galvanic zinc finish. Electrolytic deposition "
        "of a zinc layer on the steel stud bolts in alkaline baths with blue "
        "passivation and drying, including anode zinc, bath chemistry and rinse water "
        "treatment for corrosion-protected studs and screws."
    ),
}


@dataclass(frozen=True)
class DemoCorpus:
    """Everything a hermetic end-to-end run needs."""

    bom: list[BomEntry]
    activities: list[LcaActivity]
    datasheets: list[Datasheet]
    gold: list[GoldLabel]
    chat_fixtures: list[tuple[str, str]]  # (prompt, response)


def generate_demo_corpus(seed: int = DEMO_SEED) -> DemoCorpus:
    """Build the corpus deterministically for a given seed.

    The seed drives only the synthetic emission factors; names, texts and
    labels are fixed so goldens stay stable.
    """
    rng = random.Random(seed)
    bom = [BomEntry(*row) for row in _BOM_ROWS]
    activities = [
        LcaActivity(
            id=aid,
            name=name,
            description=description,
            emission_factor=round(rng.uniform(0.05, 8.0), 3),
            unit=unit,
        )
        for aid, name, description, unit in _ACTIVITY_ROWS
    ]
    datasheets = [
        Datasheet(id=filename, filename=filename, body=body)
        for filename, body in sorted(_DATASHEETS.values())
    ]
    gold = [GoldLabel(cid, _GOLD[cid]) for cid, *_ in _BOM_ROWS]

    # Canned fixtures must cover every prompt the pipeline can build: the
    # no-datasheet prompt for every component, plus the with-datasheet
    # prompt for components whose sheet actually clears the threshold.
    embedder = LocalHashEmbedder(dim=_EMBED_DIM)
    pool_embeddings = docmatch.embed_pool(datasheets, embedder)
    by_filename = {sheet.filename: sheet for sheet in datasheets}
    fixtures: list[tuple[str, str]] = []
    for entry in bom:
        fixtures.append((llm.build_prompt(entry, None), _RESPONSES_NO_DATASHEET[entry.id]))
        match = docmatch.select_datasheet(
            entry, datasheets, embedder, _DATASHEET_THRESHOLD, pool_embeddings=pool_embeddings
        )
        if match is not None:
            expected = _DATASHEETS.get(entry.id)
            response = _RESPONSES_WITH_DATASHEET.get(entry.id)
            if expected is None or response is None or match.sheet.filename != expected[0]:
                raise AssertionError(
                    f"demo corpus drift: unexpected datasheet match "
                    f"{match.sheet.filename!r} for {entry.id}"
                )
            fixtures.append((llm.build_prompt(entry, by_filename[match.sheet.filename]), response))
        elif entry.id in _RESPONSES_WITH_DATASHEET:
            raise AssertionError(
                f"demo corpus drift: expected a datasheet match for {entry.id}"
            )
    return DemoCorpus(
        bom=bom,
        activities=activities,
        datasheets=datasheets,
        gold=gold,
        chat_fixtures=fixtures,
    )


@dataclass(frozen=True)
class DemoPaths:
    root: Path
    bom: Path
    lca_db: Path
    datasheets: Path
    gold: Path
    chat_fixtures: Path


def write_demo_corpus(corpus: DemoCorpus, out_dir: str | Path) -> DemoPaths:
    """Write the corpus in the exact formats the ingest module reads."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    paths = DemoPaths(
        root=root,
        bom=root / "bom.csv",
        lca_db=root / "lca_db.jsonl",
        datasheets=root / "datasheets",
        gold=root / "gold.jsonl",
        chat_fixtures=root / "llm_fixtures.jsonl",
    )
    with open(paths.bom, "w", encoding="utf-8") as fh:
        write_bom(corpus.bom, fh)
    with open(paths.lca_db, "w", encoding="utf-8") as fh:
        write_lca_db(corpus.activities, fh)
    write_datasheets(corpus.datasheets, paths.datasheets)
    with open(paths.gold, "w", encoding="utf-8") as fh:
        write_gold_labels(corpus.gold, fh)
    llm.write_chat_fixtures(corpus.chat_fixtures, paths.chat_fixtures)
    return paths
