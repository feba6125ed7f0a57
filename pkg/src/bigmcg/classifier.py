"""Three-valued verdicts about conjugacy classes of big mapping class groups.

Every Yes or No carries citation anchors naming the result it rests on, and
Unknown lists the criteria that were tried without firing.  Anchors are
descriptive; ``CITATIONS`` maps each to a one-line statement.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

from .end_space import (
    INF,
    has_cantor,
    has_nonplanar,
    is_infinite_type,
    normalize,
    parse_ends,
    recognize_named,
    to_text,
)
from .errors import ValidityError
from .mann_rafi import end_equivalence_classes, maximal_ends

YES, NO, UNKNOWN = "Yes", "No", "Unknown"

CITATIONS = {
    "all-conjugacy-classes-meager": "every conjugacy class of MCG of an infinite-type surface is meager",
    "dense-class-characterization": "MCG has a dense conjugacy class iff no finite-type non-displaceable subsurface and a unique maximal end",
    "somewhere-dense-characterization": "MCG has a somewhere dense conjugacy class iff at most two maximal ends and no finite-type non-displaceable subsurface",
    "pmap-closed-subgroups-no-dense-class": "closed subgroups of PMap containing twist powers have no dense conjugacy class unless the surface is the Loch Ness monster",
    "loch-ness-dense-class": "MCG of the Loch Ness monster (and any closed subgroup containing PMap_c) has a dense conjugacy class",
    "extended-mcg-no-dense-class": "the extended mapping class group has no dense conjugacy class",
    "full-genus-subsurface-nondisplaceable": "with finite positive genus, a subsurface carrying all the genus is non-displaceable",
    "invariant-end-set-separation": "a subsurface separating an invariant set of at least three ends is non-displaceable",
    "two-maximal-ends-nondisplaceable-example": "surfaces with two maximal ends and a finite-type non-displaceable subsurface exist",
    "genus-zero-countable-one-maximal-end": "genus zero with ends w^a+1 has no finite-type non-displaceable subsurface and a unique maximal end",
    "distinct-finite-maximal-classes-normal-subgroup": "two finite maximal classes of distinct types give a closed normal subgroup obstructing density",
    "cantor-maximal-class-pair-of-pants": "a Cantor set of maximal ends rules out a somewhere dense conjugacy class",
    "maximal-ends-finite-or-cantor": "each maximal class is finite or a Cantor set",
    "flute-dense-class": "MCG of the flute surface has a dense conjugacy class",
    "once-punctured-loch-ness-nondisplaceable": "the once-punctured Loch Ness monster has a finite-type non-displaceable subsurface",
}


@dataclass(frozen=True)
class DisplaceabilityCert:
    tag: str
    witness: dict = field(default_factory=dict)

    def as_dict(self):
        return {"tag": self.tag, **self.witness}


@dataclass(frozen=True)
class Verdict:
    value: str
    reason: str
    citations: tuple = ()
    certificate: object = None
    heuristic: bool = False
    unfired: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "citations", tuple(dict.fromkeys(self.citations)))
        if self.value in (YES, NO) and not self.citations:
            raise ValueError("a Yes/No verdict needs a citation")

    def as_dict(self):
        out = {"value": self.value, "reason": self.reason, "citations": list(self.citations)}
        if self.certificate is not None:
            out["certificate"] = self.certificate.as_dict()
        if self.heuristic:
            out["heuristic"] = True
        if self.value == UNKNOWN:
            out["unfired"] = list(self.unfired)
        return out


@dataclass(frozen=True)
class ClassifierConfig:
    strict: bool = False


@dataclass(frozen=True)
class ClassificationReport:
    spec_text: str
    named_surface: object
    maximal_end_summary: str
    meager: Verdict
    dense: Verdict
    somewhere_dense: Verdict
    pmap_dense: Verdict
    extended_dense: Verdict
    displaceability: Verdict

    VERDICTS = ("meager", "dense", "somewhere_dense", "pmap_dense", "extended_dense", "displaceability")

    def as_dict(self):
        out = {
            "spec": self.spec_text,
            "named_surface": self.named_surface,
            "maximal_ends": self.maximal_end_summary,
        }
        for name in self.VERDICTS:
            out[name] = getattr(self, name).as_dict()
        return out

    def to_structured(self):
        return json.dumps(self.as_dict(), indent=2, ensure_ascii=False)

    def to_text(self):
        lines = [
            f"surface: {self.spec_text}",
            f"named: {self.named_surface or '-'}",
            f"maximal ends: {self.maximal_end_summary}",
        ]
        for name in self.VERDICTS:
            v = getattr(self, name)
            tag = " [heuristic]" if v.heuristic else ""
            lines.append(f"{name}: {v.value}{tag} ({v.reason})")
            if v.citations:
                lines.append(f"  cites: {', '.join(v.citations)}")
            if v.certificate is not None:
                lines.append(f"  certificate: {json.dumps(v.certificate.as_dict(), sort_keys=False)}")
            if v.value == UNKNOWN and v.unfired:
                lines.append(f"  unfired: {', '.join(v.unfired)}")
        return "\n".join(lines)


def _genus_text(spec):
    return "inf" if spec.genus == INF else str(spec.genus)


def load_curated():
    text = resources.files("bigmcg").joinpath("curated_surfaces.json").read_text(encoding="utf-8")
    table = {}
    for entry in json.loads(text)["entries"]:
        key = (entry["genus"], to_text(normalize(parse_ends(entry["ends"])).raw_normal_form))
        table[key] = entry
    return table


_CURATED = None


def curated_entry(spec):
    global _CURATED
    if _CURATED is None:
        _CURATED = load_curated()
    return _CURATED.get((_genus_text(spec), to_text(normalize(spec.ends).raw_normal_form)))


# ---------------------------------------------------------------- displaceability

CRITERIA = ("PositiveFiniteGenus", "InvariantSetGE3", "Figure7Pattern", "RemarkOneNegative", "CuratedTable")


def nondisplaceable_finite_type(spec, config=ClassifierConfig()):
    """Does the surface contain a finite-type non-displaceable subsurface?"""
    report = end_equivalence_classes(spec)
    tried = []

    tried.append("PositiveFiniteGenus")
    if spec.genus != INF and spec.genus > 0:
        return Verdict(YES, f"finite positive genus {spec.genus}",
                       ("full-genus-subsurface-nondisplaceable",),
                       DisplaceabilityCert("PositiveFiniteGenus", {"genus": spec.genus}))

    tried.append("InvariantSetGE3")
    finite = [c for c in report.classes if c.cardinality.is_finite()]
    z_size = sum(c.cardinality.n for c in finite)
    if z_size >= 3:
        z = [f"{to_text(c.representative.germ_expr)} x{c.cardinality.n}" for c in finite]
        return Verdict(YES, f"invariant end set Z of size {z_size}",
                       ("invariant-end-set-separation",),
                       DisplaceabilityCert("InvariantSetGE3", {"Z": z, "size": z_size}))

    tried.append("Figure7Pattern")
    if not config.strict:
        pattern = _figure7(spec, report)
        if pattern:
            return Verdict(YES, "finitely many nonplanar ends and finitely many planar maximal ends",
                           ("two-maximal-ends-nondisplaceable-example",),
                           DisplaceabilityCert("Figure7Pattern", pattern), heuristic=True)

    tried.append("RemarkOneNegative")
    if spec.genus == 0 and not has_cantor(spec.ends):
        alpha, n = normalize(spec.ends).countable_part[0]
        if n == 1:
            return Verdict(NO, f"genus zero with ends w^{alpha}+1",
                           ("genus-zero-countable-one-maximal-end",),
                           DisplaceabilityCert("RemarkOneNegative", {"alpha": str(alpha)}))

    tried.append("CuratedTable")
    entry = curated_entry(spec)
    if entry is not None and not (entry["heuristic"] and config.strict):
        return Verdict(entry["displaceability"], entry["justification"], tuple(entry["citations"]),
                       DisplaceabilityCert(entry["tag"], {"entry": entry["name"]}),
                       heuristic=entry["heuristic"])
    return Verdict(UNKNOWN, "no criterion applies", unfired=tuple(tried))


def _figure7(spec, report):
    # E_inf finite and nonempty, planar maximal ends finite and nonempty
    if not has_nonplanar(spec.ends):
        return None
    nonplanar = [c for c in report.classes if c.representative.mark.value == "nonplanar"]
    if not all(c.cardinality.is_finite() for c in nonplanar):
        return None
    planar_max = [report.classes[i] for i in report.maximal_classes
                  if report.classes[i].representative.mark.value == "planar"]
    if not planar_max or not all(c.cardinality.is_finite() for c in planar_max):
        return None
    return {
        "nonplanar_ends": sum(c.cardinality.n for c in nonplanar),
        "planar_maximal_ends": sum(c.cardinality.n for c in planar_max),
    }


# ---------------------------------------------------------------- classification

def classify(spec, config=ClassifierConfig()):
    if not is_infinite_type(spec):
        raise ValidityError("finite-type surface: the classifier needs an infinite-type surface")
    named = recognize_named(spec)
    mx = maximal_ends(spec)
    count = mx.count
    disp = nondisplaceable_finite_type(spec, config)

    meager = Verdict(YES, "holds for every infinite-type surface", ("all-conjugacy-classes-meager",))
    dense = _dense(disp, mx)
    somewhere = _somewhere(disp, count)
    if named == "LochNess":
        pmap = Verdict(YES, "Loch Ness monster", ("loch-ness-dense-class",))
    else:
        pmap = Verdict(NO, "not the Loch Ness monster", ("pmap-closed-subgroups-no-dense-class",))
    extended = Verdict(NO, "holds for every infinite-type surface", ("extended-mcg-no-dense-class",))
    return ClassificationReport(spec.to_text(), named, str(mx), meager, dense, somewhere,
                                pmap, extended, disp)


def _dense(disp, mx):
    count = mx.count
    if disp.value == YES:
        return Verdict(NO, "finite-type non-displaceable subsurface", ("dense-class-characterization",) + disp.citations,
                       heuristic=disp.heuristic)
    if count.kind == "cantor":
        return Verdict(NO, "Cantor set of maximal ends",
                       ("dense-class-characterization", "cantor-maximal-class-pair-of-pants"))
    if count.n >= 2:
        cites = ("dense-class-characterization",)
        finite_types = [c for c in mx.classes if c.cardinality.is_finite()]
        if len(finite_types) >= 2:
            cites += ("distinct-finite-maximal-classes-normal-subgroup",)
        return Verdict(NO, f"{count.n} maximal ends", cites)
    if disp.value == NO:
        return Verdict(YES, "unique maximal end and no finite-type non-displaceable subsurface",
                       ("dense-class-characterization",) + disp.citations, heuristic=disp.heuristic)
    return Verdict(UNKNOWN, "unique maximal end but displaceability undecided", unfired=disp.unfired)


def _somewhere(disp, count):
    if count.kind == "cantor":
        return Verdict(NO, "Cantor set of maximal ends",
                       ("somewhere-dense-characterization", "cantor-maximal-class-pair-of-pants"))
    if count.n >= 3:
        return Verdict(NO, f"{count.n} maximal ends", ("somewhere-dense-characterization",))
    if disp.value == YES:
        return Verdict(NO, "finite-type non-displaceable subsurface",
                       ("somewhere-dense-characterization",) + disp.citations, heuristic=disp.heuristic)
    if disp.value == NO:
        return Verdict(YES, f"{count.n} maximal end{'s' if count.n != 1 else ''} and no finite-type non-displaceable subsurface",
                       ("somewhere-dense-characterization",) + disp.citations, heuristic=disp.heuristic)
    return Verdict(UNKNOWN, "at most two maximal ends but displaceability undecided", unfired=disp.unfired)
