# data_loader.py
import json
import logging
from datetime import datetime, timezone

from exactalg import InjektError, Polynomial
from morphism import Morphism
from sepinv import InvariantSet
from tensors import RationalCurveP3, Tensor222n

logger = logging.getLogger(__name__)


class InputFormatError(InjektError):
    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def load_json(path):
    """
    Read one JSON document.

    Args:
        path (str): file to read

    Returns:
        dict or list: the parsed document

    Raises:
        InputFormatError: the file is not valid JSON
    """
    logger.info(f"Loading {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON at line {exc.lineno}: {exc.msg}", path) from exc
    except OSError as exc:
        raise InputFormatError(f"cannot read file: {exc.strerror}", path) from exc


def dump_json(data, path=None):
    """Serialize with sorted keys; write to `path` when given and return the text."""
    text = json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)
    if path:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"Wrote {path}")
    return text


def _expect_object(data, path, *keys):
    if not isinstance(data, dict):
        raise InputFormatError("expected a JSON object", path)
    missing = [k for k in keys if k not in data]
    if missing:
        raise InputFormatError(f"missing field(s) {', '.join(missing)}", path)
    return data


def load_morphism(path):
    data = _expect_object(load_json(path), path, "source", "sections")
    m = Morphism.from_json(data)
    logger.info(f"Loaded morphism {m.label or '(unlabelled)'}: {m.source.label} -> P^{m.ambient_dimension}")
    return m


def save_morphism(m, path):
    return dump_json(m.to_json(), path)


def load_tensor(path):
    """Tensor JSON: {"m": ..., "slices": [[[a, b], [c, d]], ...], "field": optional}."""
    data = _expect_object(load_json(path), path, "slices")
    t = Tensor222n.from_json(data)
    logger.info(f"Loaded 2x2x{t.m + 1} tensor over {t.field}")
    return t


def load_curve(path):
    """Curve JSON: {"forms": [[c0, ..., cd], x4]} with c_i the coefficient of s0^(d-i) s1^i."""
    data = _expect_object(load_json(path), path, "forms")
    return RationalCurveP3.from_json(data)


def load_invariant_set(path, k=None, weights=None):
    """
    Invariant set JSON: {"k", "weights", "polynomials": [...], "names": optional},
    or a bare list of polynomials when k and weights come from the command line.
    """
    data = load_json(path)
    if isinstance(data, list):
        data = {"polynomials": data}
    _expect_object(data, path, "polynomials")
    k = k if k is not None else data.get("k")
    weights = weights if weights is not None else data.get("weights")
    if k is None or weights is None:
        raise InputFormatError("k and weights must be given in the file or on the command line", path)
    if data.get("k") not in (None, k) or (data.get("weights") is not None and tuple(data["weights"]) != tuple(weights)):
        logger.warning(f"Command-line group (k={k}, weights={tuple(weights)}) overrides the one in {path}")
    polys = [Polynomial.from_json(p) for p in data["polynomials"]]
    invariants = InvariantSet(polys, k, weights, data.get("names"))
    logger.info(f"Loaded {len(invariants)} invariants for Z_{k} with weights {tuple(weights)}")
    return invariants


def stamp(report, include_timestamp=True):
    """Copy of a report dict with a UTC timestamp unless suppressed."""
    data = dict(report)
    if include_timestamp:
        data["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return data


def render_text(data, indent=0):
    """One line per scalar field; nested objects and lists indented beneath their key."""
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for key in sorted(data):
            value = data[key]
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.append(render_text(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {value}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{data}")
    return "\n".join(line for line in lines if line)


def write_report(report, path=None, fmt="json", include_timestamp=True):
    """
    Write a report dict as sorted JSON or as text.

    Returns:
        str: the rendered report
    """
    data = stamp(report, include_timestamp)
    if fmt == "text":
        text = render_text(data)
        if path:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text + "\n")
            logger.info(f"Wrote {path}")
        return text
    return dump_json(data, path)
