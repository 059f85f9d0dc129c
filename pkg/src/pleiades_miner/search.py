"""Exhaustive classifier search with leave-one-out scoring.

A search space is a JSON document:

    {
      "basis": "decade",
      "features": ["age", ...],            # optional universe override
      "weights": [0.5, 1.0, 1.15],
      "subsets": {"mode": "all", "max_size": 3},
      "methods": {
        "DT": {"params": {"criterion": ["entropy"], "min_leaf": [3, 8]}},
        "KNN": {"params": {...}, "subsets": {"mode": "ranked_prefix",
                                             "prefix_sizes": [4, 6]}}
      },
      "extra_subsets_by_target": {"ecstasy": [["age", "ss", "gender"]]}
    }

Configurations are enumerated in a canonical order: methods in
declaration order, then feature subsets (size ascending, lexicographic
within a size for mode "all"; listed order otherwise), then the
parameter grid (cartesian product with the last declared parameter
varying fastest), then the weights in declared order. The enumeration
index is the config_id; an optional budget evaluates only the prefix.
Results are reduced by config_id, so the leaderboard is byte-identical
for any worker count, and reruns with equal inputs reproduce files
byte for byte (nothing in the outputs depends on wall time).
"""

import itertools
import json
import os
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import multiprocessing
import numpy as np

from .bundle import make_bundle, save_bundle
from .datasets import user_vector
from .evaluation import (loocv_dt, loocv_knn_grid, loocv_nb_grid,
                         loocv_pdfe_grid, loocv_method, percent_display,
                         select_best, sensitivity, specificity)
from .classifiers import DegenerateModelError, METHODS
from .ranking import double_kaiser_ranking

__all__ = ["FEATURE_UNIVERSE", "load_space", "enumerate_configs",
           "run_search", "evaluate_groups", "Config"]

FEATURE_UNIVERSE = ("age", "education", "nscore", "escore", "oscore",
                    "ascore", "cscore", "impulsive", "ss", "gender")

Config = namedtuple("Config", "config_id method subset params weight")

LEADERBOARD_COLUMNS = ("config_id", "method", "features", "params", "weight",
                       "tp", "fn", "tn", "fp", "sens", "spec", "min", "sum")


def load_space(source):
    with open(source, "r", encoding="utf-8") as fh:
        space = json.load(fh)
    for key in ("methods", "weights"):
        if key not in space:
            raise ValueError(f"search space is missing {key!r}")
    for name in space["methods"]:
        if name not in METHODS:
            raise ValueError(f"search space names unknown method {name!r}")
    return space


def _resolve_subsets(spec, universe, dk_ranking, extras):
    """Materialize a subset specification into index tuples.

    Subsets are canonicalized to ascending feature indices. extras are
    appended last in listed order, skipping duplicates.
    """
    token_index = {tok: i for i, tok in enumerate(universe)}
    mode = spec.get("mode", "all")
    if mode not in ("all", "ranked_prefix", "all_plus_ranked", "explicit"):
        raise ValueError(f"unknown subset mode {mode!r}")
    out = []
    if mode in ("all", "all_plus_ranked"):
        max_size = int(spec.get("max_size", len(universe)))
        for size in range(1, max_size + 1):
            out.extend(itertools.combinations(range(len(universe)), size))
    if mode in ("ranked_prefix", "all_plus_ranked"):
        if dk_ranking is None:
            raise ValueError("ranked_prefix subsets need a feature ranking")
        sizes = spec.get("prefix_sizes")
        if sizes is None:
            sizes = list(range(1, len(universe) + 1))
        seen_all = set(out)
        for size in sizes:
            subset = tuple(sorted(dk_ranking[:int(size)]))
            if subset not in seen_all:
                out.append(subset)
                seen_all.add(subset)
    if mode == "explicit":
        for tokens in spec["explicit"]:
            out.append(tuple(sorted(token_index[t] for t in tokens)))
    seen = set(out)
    for tokens in extras:
        subset = tuple(sorted(token_index[t] for t in tokens))
        if subset not in seen:
            out.append(subset)
            seen.add(subset)
    return out


def _param_grid(params_spec):
    """Cartesian product in declared order, last parameter fastest."""
    if not params_spec:
        return [{}]
    names = list(params_spec)
    grids = [params_spec[n] for n in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*grids)]


def enumerate_configs(space, universe, dk_ranking=None, target=None):
    """Canonically ordered list of configurations for one target."""
    extras = []
    by_target = space.get("extra_subsets_by_target", {})
    if target is not None and target in by_target:
        extras = by_target[target]
    default_subsets = space.get("subsets", {"mode": "all"})
    configs = []
    config_id = 0
    for method, mspec in space["methods"].items():
        subsets = _resolve_subsets(
            mspec.get("subsets", default_subsets), universe, dk_ranking,
            extras)
        grid = _param_grid(mspec.get("params", {}))
        for subset in subsets:
            for params in grid:
                for weight in space["weights"]:
                    configs.append(Config(config_id, method, subset,
                                          params, float(weight)))
                    config_id += 1
    return configs


def _group_key(cfg):
    return (cfg.method, cfg.subset)


def _group_configs(configs):
    """Consecutive (method, subset) groups in enumeration order."""
    groups = []
    for key, members in itertools.groupby(configs, key=_group_key):
        groups.append((key, list(members)))
    return groups


def _evaluate_group(method, subset, members, X_full, y, seed):
    """(config_id, counts-or-None) for every member of one group.

    Fast evaluators cover KNN, PDFE, NB and DT; the rest go through the
    reference evaluator. DegenerateModelError marks the configuration
    as failed rather than aborting the search.
    """
    Xs = np.ascontiguousarray(X_full[:, list(subset)])
    out = []
    if method == "KNN":
        cfgs = [dict(m.params, user_weight=m.weight) for m in members]
        for m, counts in zip(members, loocv_knn_grid(Xs, y, cfgs)):
            out.append((m.config_id, counts))
    elif method == "PDFE":
        cfgs = [dict(m.params, user_weight=m.weight) for m in members]
        try:
            results = loocv_pdfe_grid(Xs, y, cfgs)
        except DegenerateModelError:
            results = []
            for m in members:
                try:
                    results.append(
                        loocv_method("PDFE", m.params, m.weight, Xs, y))
                except DegenerateModelError:
                    results.append(None)
        for m, counts in zip(members, results):
            out.append((m.config_id, counts))
    elif method == "NB":
        for params, sub in itertools.groupby(
                members, key=lambda m: tuple(sorted(m.params.items()))):
            sub = list(sub)
            weights = [m.weight for m in sub]
            results = loocv_nb_grid(Xs, y, weights, **dict(params))
            for m, counts in zip(sub, results):
                out.append((m.config_id, counts))
    elif method == "DT":
        for m in members:
            counts = loocv_dt(Xs, y,
                              m.params.get("criterion", "entropy"),
                              m.params.get("min_leaf", 3), m.weight)
            out.append((m.config_id, counts))
    else:
        for m in members:
            params = m.params
            if method == "RF" and "seed" not in params:
                params = dict(params, seed=seed)
            try:
                counts = loocv_method(method, params, m.weight, Xs, y)
            except DegenerateModelError:
                counts = None
            out.append((m.config_id, counts))
    return out


_WORKER_STATE = {}


def _worker(group_index):
    state = _WORKER_STATE
    (method, subset), members = state["groups"][group_index]
    return group_index, _evaluate_group(method, subset, members,
                                        state["X"], state["y"], state["seed"])


def evaluate_groups(groups, X_full, y, jobs, seed):
    """Evaluate all groups, reducing by group index.

    The reduction is keyed, never order-of-completion, so results are
    identical for any positive number of workers.
    """
    results = {}
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(groups) <= 1:
        for gi in range(len(groups)):
            (method, subset), members = groups[gi]
            results[gi] = _evaluate_group(method, subset, members,
                                          X_full, y, seed)
    else:
        _WORKER_STATE.update(
            {"groups": groups, "X": X_full, "y": y, "seed": seed})
        ctx = multiprocessing.get_context("fork")
        try:
            with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
                for gi, res in pool.map(_worker, range(len(groups)),
                                        chunksize=1):
                    results[gi] = res
        finally:
            _WORKER_STATE.clear()
    flat = {}
    for gi in range(len(groups)):
        for config_id, counts in results[gi]:
            flat[config_id] = counts
    return flat


def _format_param_value(v):
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _params_text(params):
    return ";".join(f"{k}={_format_param_value(v)}" for k, v in params.items())


def _weight_text(w):
    return repr(float(w))


def run_search(table, target, basis, space, out_dir, jobs=None, seed=0,
               budget=None):
    """Run the search and write leaderboard.csv, best.json and
    search_meta.json into out_dir. Returns a summary dict."""
    universe = tuple(space.get("features", FEATURE_UNIVERSE))
    X_full = table.attribute_matrix(universe)
    y = user_vector(table, target, basis)
    if int(y.sum()) < 2 or int((1 - y).sum()) < 2:
        raise ValueError(
            f"target {target!r} at basis {basis!r} needs at least two rows "
            "in each class")

    dk_ranking = None
    needs_ranking = any(
        m.get("subsets", space.get("subsets", {})).get("mode") == "ranked_prefix"
        for m in space["methods"].values())
    if needs_ranking:
        dk_ranking = double_kaiser_ranking(X_full).ranking

    configs = enumerate_configs(space, universe, dk_ranking, target)
    n_total = len(configs)
    if budget is not None:
        configs = configs[:int(budget)]

    # warm the compiled kernel before forking so workers inherit it
    if any(c.method == "DT" for c in configs):
        warm_X = X_full[:8, :1]
        warm_y = np.array([0, 1, 0, 1, 0, 1, 0, 1], dtype=np.int8)
        loocv_dt(warm_X, warm_y, "entropy", 1, 1.0)

    groups = _group_configs(configs)
    counts_by_id = evaluate_groups(groups, X_full, y, jobs, seed)

    evaluated = []
    failed = []
    for cfg in configs:
        counts = counts_by_id[cfg.config_id]
        if counts is None:
            failed.append(cfg)
        else:
            evaluated.append((cfg, counts))

    best = select_best(
        (cfg.config_id, counts) for cfg, counts in evaluated)

    def sort_key(item):
        cfg, counts = item
        tp, fn, tn, fp = counts
        sens = sensitivity(tp, fn)
        spec = specificity(tn, fp)
        return (-min(sens, spec), -(sens + spec), cfg.config_id)

    evaluated.sort(key=sort_key)

    os.makedirs(out_dir, exist_ok=True)
    lb_path = os.path.join(out_dir, "leaderboard.csv")
    with open(lb_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(LEADERBOARD_COLUMNS) + "\n")
        for cfg, counts in evaluated:
            tp, fn, tn, fp = counts
            sens = sensitivity(tp, fn)
            spec = specificity(tn, fp)
            fh.write(",".join([
                str(cfg.config_id), cfg.method,
                ";".join(universe[i] for i in cfg.subset),
                _params_text(cfg.params), _weight_text(cfg.weight),
                str(tp), str(fn), str(tn), str(fp),
                percent_display(sens), percent_display(spec),
                percent_display(min(sens, spec)),
                percent_display(sens + spec),
            ]) + "\n")
        for cfg in failed:
            fh.write(",".join([
                str(cfg.config_id), cfg.method,
                ";".join(universe[i] for i in cfg.subset),
                _params_text(cfg.params), _weight_text(cfg.weight),
                "", "", "", "", "", "", "", "",
            ]) + "\n")

    best_summary = None
    if best is not None:
        best_id, best_counts = best
        best_cfg = next(c for c in configs if c.config_id == best_id)
        tokens = [universe[i] for i in best_cfg.subset]
        params = best_cfg.params
        if best_cfg.method == "RF" and "seed" not in params:
            params = dict(params, seed=seed)
        bundle = make_bundle(
            best_cfg.method, params, best_cfg.weight, tokens, basis, target,
            X_full[:, list(best_cfg.subset)], y, seed=seed)
        save_bundle(bundle, os.path.join(out_dir, "best.json"))
        tp, fn, tn, fp = best_counts
        best_summary = {
            "config_id": best_id,
            "method": best_cfg.method,
            "features": tokens,
            "params": params,
            "weight": best_cfg.weight,
            "tp": tp, "fn": fn, "tn": tn, "fp": fp,
            "sens": percent_display(sensitivity(tp, fn)),
            "spec": percent_display(specificity(tn, fp)),
        }

    meta = {
        "tool": "pleiades-miner/search@1",
        "target": target,
        "basis": basis,
        "features": list(universe),
        "ranking": (None if dk_ranking is None
                    else [universe[i] for i in dk_ranking]),
        "n_rows": int(X_full.shape[0]),
        "n_users": int(y.sum()),
        "n_configs_total": n_total,
        "budget": None if budget is None else int(budget),
        "n_evaluated": len(evaluated),
        "n_failed": len(failed),
        "seed": int(seed),
        "best": best_summary,
        "space": space,
    }
    with open(os.path.join(out_dir, "search_meta.json"), "w",
              encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return meta
