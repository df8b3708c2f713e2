#!/usr/bin/env python3
"""Regenerates scenario expectations and the fixture count snapshot.

Deliberately shares no code with the Rust engine: it re-reads the JSON
ontology documents, runs a naive fixpoint classifier, and applies the two
fixture policies as plain Python predicates (haversine distance, absolute
time difference).

    python3 fixtures/oracle/generate_expected.py          # rewrite files
    python3 fixtures/oracle/generate_expected.py --check  # verify only
"""

import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
BUILTIN = {
    "aco": "http://sxacml.example.org/ns/aco#",
    "fit": "http://sxacml.example.org/ns/fitness#",
    "ppo": "http://sxacml.example.org/ns/privacy#",
    "p3p": "http://sxacml.example.org/ns/p3p#",
    "org": "http://sxacml.example.org/ns/org#",
    "sosa": "http://sxacml.example.org/ns/sosa#",
}
ACO = BUILTIN["aco"]
FIT = BUILTIN["fit"]
ORG = BUILTIN["org"]
EARTH_RADIUS_M = 6_371_000.0
RADIUS_M = 1000.0
WINDOW_MS = 3_600_000


def resolve(name, prefixes):
    if name.startswith("<") and name.endswith(">"):
        return name[1:-1]
    prefix, sep, local = name.partition(":")
    if sep and prefix in prefixes:
        return prefixes[prefix] + local
    return name


def epoch_ms(text):
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    return int(dt.astimezone(timezone.utc).timestamp() * 1000)


def literal(lit):
    kind, value = lit["kind"], lit["value"]
    if kind == "dateTime":
        return (kind, epoch_ms(value))
    if kind == "geoPoint":
        return (kind, (float(value["lat"]), float(value["lon"])))
    if kind == "double":
        return (kind, float(value))
    return (kind, value)


class Ontology:
    def __init__(self):
        self.axioms = set()
        self.sub = {}  # named class -> direct superclasses
        self.rules = []  # (expression, class)
        self.declared_classes = set()
        self.mentioned_classes = set()
        self.object_props = {}  # property -> [(domain, range)]
        self.data_props = {}  # property -> [domain]
        self.types = {}  # individual -> asserted classes
        self.objects = []  # (subject, property, object)
        self.data = []  # (subject, property, literal)
        self.individuals = set()

    def load(self, doc):
        p = dict(doc.get("prefixes", {}))
        r = lambda n: resolve(n, p)
        for c in doc.get("classes", []):
            self.axioms.add(("class", r(c)))
            self.declared_classes.add(r(c))
            self.mentioned_classes.add(r(c))
        for sub, sup in doc.get("subClassOf", []):
            sup = r(sup)
            self.mentioned_classes.add(sup)
            if isinstance(sub, str):
                self.sub.setdefault(r(sub), set()).add(sup)
                self.mentioned_classes.add(r(sub))
                self.axioms.add(("sub", r(sub), sup))
            else:
                e = self.expr(sub, r)
                self.rules.append((e, sup))
                self.axioms.add(("sub", repr(e), sup))
        for eq in doc.get("equivalent", []):
            e = self.expr(eq["expr"], r)
            self.rules.append((e, r(eq["name"])))
            self.mentioned_classes.add(r(eq["name"]))
            self.axioms.add(("eq", r(eq["name"]), repr(e)))
        for prop in doc.get("objectProperties", []):
            d = r(prop["domain"]) if "domain" in prop else None
            rg = r(prop["range"]) if "range" in prop else None
            self.object_props.setdefault(r(prop["name"]), []).append((d, rg))
            self.mentioned_classes.update(x for x in (d, rg) if x)
            self.axioms.add(("oprop", r(prop["name"]), d, rg))
        for prop in doc.get("dataProperties", []):
            d = r(prop["domain"]) if "domain" in prop else None
            self.data_props.setdefault(r(prop["name"]), []).append(d)
            if d:
                self.mentioned_classes.add(d)
            self.axioms.add(("dprop", r(prop["name"]), d, prop.get("range")))
        for ind in doc.get("individuals", []):
            name = r(ind["name"])
            self.individuals.add(name)
            for t in ind.get("types", []):
                self.assert_type(name, r(t))
            for prop in ind.get("props", []):
                if "o" in prop:
                    self.assert_object(name, r(prop["p"]), r(prop["o"]))
                else:
                    self.assert_data(name, r(prop["p"]), literal(prop["literal"]))

    def assert_type(self, ind, cls):
        self.individuals.add(ind)
        self.mentioned_classes.add(cls)
        self.types.setdefault(ind, set()).add(cls)
        self.axioms.add(("type", cls, ind))

    def assert_object(self, s, p, o):
        self.individuals.update((s, o))
        self.objects.append((s, p, o))
        self.axioms.add(("obj", p, s, o))

    def assert_data(self, s, p, lit):
        self.individuals.add(s)
        self.data.append((s, p, lit))
        self.axioms.add(("data", p, s, lit))

    def expr(self, e, r):
        (tag, body), = e.items()
        if tag == "named":
            self.mentioned_classes.add(r(body))
            return ("named", r(body))
        if tag == "and":
            return ("and", tuple(self.expr(x, r) for x in body))
        if tag == "some":
            return ("some", r(body["p"]), self.expr(body["expr"], r))
        if tag == "hasValue":
            v = body["value"]
            return ("hasValue", r(body["p"]), r(v) if isinstance(v, str) else literal(v))
        if tag == "data":
            return ("data", r(body["p"]), body["op"], literal(body["literal"]))
        raise ValueError(tag)

    def classify(self):
        """Naive fixpoint: re-apply every rule until nothing changes."""
        types = {i: set(self.types.get(i, ())) for i in self.individuals}
        changed = True
        while changed:
            changed = False

            def add(ind, cls):
                nonlocal changed
                if cls not in types[ind]:
                    types[ind].add(cls)
                    changed = True

            for ind in self.individuals:
                for cls in list(types[ind]):
                    for sup in self.sub.get(cls, ()):
                        add(ind, sup)
            for s, p, o in self.objects:
                for d, rg in self.object_props.get(p, ()):
                    if d:
                        add(s, d)
                    if rg:
                        add(o, rg)
            for s, p, _ in self.data:
                for d in self.data_props.get(p, ()):
                    if d:
                        add(s, d)
            for e, cls in self.rules:
                for ind in self.individuals:
                    if self.sat(types, ind, e):
                        add(ind, cls)
        return types

    def sat(self, types, ind, e):
        tag = e[0]
        if tag == "named":
            return e[1] in types.get(ind, ())
        if tag == "and":
            return all(self.sat(types, ind, x) for x in e[1])
        if tag == "some":
            return any(s == ind and p == e[1] and self.sat(types, o, e[2]) for s, p, o in self.objects)
        if tag == "hasValue":
            if isinstance(e[2], str):
                return (ind, e[1], e[2]) in self.objects
            return (ind, e[1], e[2]) in self.data
        if tag == "data":
            ops = {"=": lambda a, b: a == b, "!=": lambda a, b: a != b, "<": lambda a, b: a < b,
                   "<=": lambda a, b: a <= b, ">": lambda a, b: a > b, ">=": lambda a, b: a >= b}
            kind, bound = e[3]
            return any(s == ind and p == e[1] and lit[0] == kind and ops[e[2]](lit[1], bound)
                       for s, p, lit in self.data)
        raise ValueError(tag)

    def copy(self):
        o = Ontology()
        o.axioms = set(self.axioms)
        o.sub = {k: set(v) for k, v in self.sub.items()}
        o.rules = list(self.rules)
        o.declared_classes = set(self.declared_classes)
        o.mentioned_classes = set(self.mentioned_classes)
        o.object_props = {k: list(v) for k, v in self.object_props.items()}
        o.data_props = {k: list(v) for k, v in self.data_props.items()}
        o.types = {k: set(v) for k, v in self.types.items()}
        o.objects = list(self.objects)
        o.data = list(self.data)
        o.individuals = set(self.individuals)
        return o


def haversine(a, b):
    (lat1, lon1), (lat2, lon2) = a, b
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def request_values(req, category, attr):
    out = []
    for a in req.get(category, []):
        if resolve(a["id"], BUILTIN) == attr:
            out.append(a)
    return out


def decide_one(onto, req, resource):
    """Both fixture policies, legal first (first applicable)."""
    subject_cls = {resolve(a["value"], BUILTIN) for a in request_values(req, "subject", ACO + "classId")}
    action_cls = {resolve(a["value"], BUILTIN) for a in request_values(req, "action", ACO + "classId")}
    env = {resolve(a["id"], BUILTIN): a["value"] for a in req.get("environment", [])}

    # Legal policy: targets police + read; permit when near the event.
    if ORG + "PoliceDepartment" in subject_cls and ACO + "Read" in action_cls:
        points = [lit[1] for s, p, lit in onto.data if s == resource and p == FIT + "locationPoint"]
        times = [lit[1] for s, p, lit in onto.data if s == resource and p == FIT + "locationTime"]
        ev_loc, ev_time = env.get(ACO + "eventLocation"), env.get(ACO + "eventTime")
        if len(points) == 1 and len(times) == 1 and ev_loc and ev_time:
            near = haversine(points[0], (ev_loc["lat"], ev_loc["lon"])) <= RADIUS_M
            recent = abs(times[0] - epoch_ms(ev_time)) <= WINDOW_MS
            if near and recent:
                return "Permit"
        elif points or times:
            raise SystemExit(f"oracle does not model missing or repeated attributes ({resource})")

    # Preferences: classify the request individual.
    o = onto.copy()
    request = "urn:oracle:request"
    o.assert_type(request, ACO + "Request")
    links = {"subject": "hasSubject", "resource": "hasResource", "action": "hasAction", "environment": "hasEnvironment"}
    cat_classes = {"subject": "Subject", "resource": "Resource", "action": "Action", "environment": "Environment"}
    for category in links:
        attrs = req.get(category, [])
        if not attrs:
            continue
        if category == "resource":
            ind = resource
        else:
            ind = f"urn:oracle:{category}"
            o.assert_type(ind, ACO + cat_classes[category])
        o.assert_object(request, ACO + links[category], ind)
        for a in attrs:
            aid = resolve(a["id"], BUILTIN)
            if aid == ACO + "classId":
                if category != "resource":
                    o.assert_type(ind, resolve(a["value"], BUILTIN))
            elif aid in o.data_props:
                o.assert_data(ind, aid, literal({"kind": a["kind"], "value": a["value"]}))
            elif aid in o.object_props:
                o.assert_object(ind, aid, resolve(a["value"], BUILTIN))
    request_types = o.classify()[request]
    if ACO + "DeniedRequest" in request_types:
        return "Deny"
    if ACO + "PermittedRequest" in request_types:
        return "Permit"
    return "NotApplicable"


def load_stack(manifest):
    onto = Ontology()
    per_doc = {}
    for e in manifest["entries"]:
        if e["kind"] == "ontology":
            doc = json.loads((ROOT / e["path"]).read_text())
            onto.load(doc)
            per_doc[e["name"]] = (
                len(doc.get("classes", [])) + len(doc.get("subClassOf", [])) + len(doc.get("equivalent", []))
                + len(doc.get("objectProperties", [])) + len(doc.get("dataProperties", []))
                + sum(len(i.get("types", [])) + len(i.get("props", [])) for i in doc.get("individuals", []))
            )
    return onto, per_doc


def expected_for(onto, req):
    resource_class = [resolve(a["value"], BUILTIN) for a in request_values(req, "resource", ACO + "classId")]
    (cls,) = resource_class
    types = onto.classify()
    instances = sorted(i for i, t in types.items() if cls in t)
    decisions = [{"decision": decide_one(onto, req, i), "resource": i} for i in instances]
    if not decisions:
        decisions = [{"decision": "NotApplicable", "resource": "<as-requested>"}]
    return {"decisions": decisions}


def dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def main():
    check = "--check" in sys.argv
    manifest = json.loads((ROOT / "manifest.json").read_text())
    onto, per_doc = load_stack(manifest)
    outputs = {}
    for e in manifest["entries"]:
        if e["kind"] == "request":
            req = json.loads((ROOT / e["path"]).read_text())
            target = next(x for x in manifest["entries"]
                          if x["kind"] == "expected-decisions" and x["name"] == e["name"])
            outputs[ROOT / target["path"]] = dump(expected_for(onto, req))
    types = onto.classify()
    outputs[ROOT / "snapshot.json"] = dump({
        "axioms": len(onto.axioms),
        "classes": len(onto.mentioned_classes),
        "declaredClasses": len(onto.declared_classes),
        "individuals": len(onto.individuals),
        "documentStatements": per_doc,
        "instances": {
            "fit:TrainingMetric": sum(1 for t in types.values() if FIT + "TrainingMetric" in t),
            "fit:Location": sum(1 for t in types.values() if FIT + "Location" in t),
            "aco:Resource": sum(1 for t in types.values() if ACO + "Resource" in t),
        },
    })
    stale = []
    for path, text in outputs.items():
        if check:
            if not path.exists() or path.read_text() != text:
                stale.append(str(path.relative_to(ROOT)))
        else:
            path.write_text(text)
            print(f"wrote {path.relative_to(ROOT)}")
    if stale:
        print("out of date: " + ", ".join(stale), file=sys.stderr)
        sys.exit(1)


if __name__ == "__main__":
    main()
