"""Command-line front door: fetch, overview, trend, symptoms, risk, demog.

Each subcommand runs one slice of the pipeline and writes machine-readable
reports (JSON/CSV) plus static SVG plots under --out.  Every artifact embeds
a provenance block (config, input checksums, seed); identical config, inputs,
and seed produce byte-identical JSON/CSV.  Failures print a one-line JSON
error record to stderr and exit nonzero.
"""

from __future__ import annotations

import datetime
import functools
import json
import sys
import zoneinfo
from pathlib import Path

import click
import numpy as np

from . import ingest, riskmodel, stattest, svgplot, transform
from .forecast import auto_arima_search
from .forecast import forecast as arima_forecast
from .report import forecast_payload, provenance_block, write_csv, write_json
from .textmine import (
    OUTCOME_DIED,
    OUTCOME_OTHER,
    SymptomDictionary,
    build_indicator_matrix,
    load_line_list,
    minmax_scale,
    ngram_frequencies,
)

DEFAULT_TIMEZONE = "America/Los_Angeles"


def _fail(exc: BaseException) -> None:
    record = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(record, sort_keys=True), err=True)
    sys.exit(1)


def _reporting_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except Exception as exc:  # noqa: BLE001 - the CLI boundary
            _fail(exc)

    return wrapper


def _out_dir(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


@click.group()
def main():
    """COVID-19 analytics toolkit: reports and plots from public data."""


@main.command()
@click.option("--date", "date_text", default=None,
              help="Report date as MM-DD-YYYY; defaults to today in --timezone.")
@click.option("--timezone", "tz_name", default=DEFAULT_TIMEZONE, show_default=True,
              help="Time zone used to resolve 'today'.")
@click.option("--cache", "cache_dir", envvar="COVID_TOOLKIT_CACHE",
              default="cache", show_default=True,
              help="Cache directory (env COVID_TOOLKIT_CACHE overrides).")
@click.option("--url-template", default=ingest.CSSE_DAILY_REPORT_TEMPLATE,
              show_default=False, help="Daily-report URL with a {date} placeholder.")
@click.option("--strict", is_flag=True, help="Fail on any malformed row.")
@_reporting_errors
def fetch(date_text, tz_name, cache_dir, url_template, strict):
    """Fetch one daily report into the cache, falling back to the last good
    file when the fetch or parse fails."""
    if date_text is None:
        today = datetime.datetime.now(zoneinfo.ZoneInfo(tz_name)).date()
        date = ingest.ReportDate.from_date(today)
    else:
        date = ingest.ReportDate.parse(date_text)
    cache = ingest.SnapshotCache(Path(cache_dir))
    snapshots, provenance = ingest.fetch_with_fallback(
        date, cache, template=url_template,
        mode="strict" if strict else "lenient",
    )
    click.echo(json.dumps({
        "date": date.mmddyyyy(),
        "provenance": provenance,
        "regions": len(snapshots),
        "cache_dir": str(cache_dir),
    }, sort_keys=True))


@main.command()
@click.option("--daily-report", "report_path", type=click.Path(exists=True),
              default=None, help="Daily-report CSV; default: latest-good cache entry.")
@click.option("--cache", "cache_dir", envvar="COVID_TOOLKIT_CACHE",
              default="cache", show_default=True)
@click.option("--level", type=click.Choice(["country", "state"]),
              default="country", show_default=True)
@click.option("--per-capita", "per_capita_flag", is_flag=True,
              help="Add per-million columns from the population table.")
@click.option("--log", "log_flag", is_flag=True,
              help="Add log10(x+1) columns.")
@click.option("--population", "population_path", type=click.Path(exists=True),
              default=None, help="region,population CSV; default: bundled table.")
@click.option("--region", "region_filter", default=None,
              help="Restrict output to one region.")
@click.option("--out", default="out", show_default=True)
@_reporting_errors
def overview(report_path, cache_dir, level, per_capita_flag, log_flag,
             population_path, region_filter, out):
    """Aggregated region table (counts, optional per-capita and log columns),
    sorted by confirmed descending."""
    inputs: dict[str, str] = {}
    if report_path is not None:
        text = Path(report_path).read_text()
        inputs["daily_report"] = report_path
    else:
        cached = ingest.SnapshotCache(Path(cache_dir)).latest_good()
        if cached is None:
            raise ingest.NoDataError(
                "no daily report given and the cache is empty; run fetch first"
            )
        name, text = cached
        inputs["daily_report"] = str(Path(cache_dir) / name)

    snapshots = ingest.aggregate_to_region(
        ingest.parse_daily_report(text), level=level
    )
    population = ingest.load_population_table(population_path)
    snapshots = ingest.attach_population(snapshots, population)
    if region_filter is not None:
        snapshots = [s for s in snapshots if s.region == region_filter]

    config = {
        "subcommand": "overview", "level": level,
        "per_capita": per_capita_flag, "log": log_flag,
        "region": region_filter,
    }
    provenance = provenance_block(config, inputs)

    header = ["region", "confirmed", "deaths", "recovered", "population"]
    if per_capita_flag:
        header += ["confirmed_per_million", "deaths_per_million",
                   "recovered_per_million"]
    if log_flag:
        header += ["log10_confirmed", "log10_deaths", "log10_recovered"]

    rows = []
    records = []
    for snap in snapshots:
        row = [snap.region, snap.confirmed, snap.deaths, snap.recovered,
               snap.population if snap.population is not None else ""]
        record = {"region": snap.region, "confirmed": snap.confirmed,
                  "deaths": snap.deaths, "recovered": snap.recovered,
                  "population": snap.population}
        if per_capita_flag:
            for metric in ("confirmed", "deaths", "recovered"):
                if snap.population is None:
                    row.append("")
                    record[f"{metric}_per_million"] = None
                else:
                    per_m = getattr(snap, metric) / snap.population * 1e6
                    row.append(format(per_m, ".2f"))
                    record[f"{metric}_per_million"] = round(per_m, 2)
        if log_flag:
            for metric in ("confirmed", "deaths", "recovered"):
                value = float(np.log10(getattr(snap, metric) + 1.0))
                row.append(format(value, ".4f"))
                record[f"log10_{metric}"] = round(value, 4)
        rows.append(row)
        records.append(record)

    out_path = _out_dir(out)
    write_csv(out_path / "overview.csv", header, rows, provenance)
    write_json(out_path / "overview.json",
               {"rows": records, "provenance": provenance})
    click.echo(f"wrote {out_path / 'overview.csv'} ({len(rows)} regions)")


@main.command()
@click.option("--timeseries", "timeseries_path", type=click.Path(exists=True),
              required=True, help="CSSE-format time-series CSV (cumulative).")
@click.option("--region", required=True)
@click.option("--metric", type=click.Choice(transform.VALID_METRICS),
              default="confirmed", show_default=True)
@click.option("--sma-window", default=14, show_default=True)
@click.option("--horizon", default=14, show_default=True,
              help="Forecast horizon in days.")
@click.option("--align-threshold", default=100.0, show_default=True,
              help="Cumulative count that defines day 0 of the outbreak.")
@click.option("--max-p", default=5, show_default=True)
@click.option("--max-q", default=5, show_default=True)
@click.option("--exhaustive", is_flag=True,
              help="Search the full (p, q) grid instead of stepwise.")
@click.option("--out", default="out", show_default=True)
@_reporting_errors
def trend(timeseries_path, region, metric, sma_window, horizon,
          align_threshold, max_p, max_q, exhaustive, out):
    """Daily increments, moving average, and an automatic ARIMA forecast with
    95% bounds; emits trend.json, trend.csv, and trend.svg."""
    text = Path(timeseries_path).read_text()
    cumulative = ingest.parse_time_series_csv(text, region, metric)
    increments = transform.daily_increments(cumulative)
    sma = transform.simple_moving_average(increments, sma_window)
    search = auto_arima_search(increments.values, max_p=max_p, max_q=max_q,
                               stepwise=not exhaustive)
    result = arima_forecast(search.model, increments.values, horizon)

    crossing = np.nonzero(cumulative.values >= align_threshold)[0]
    day0 = cumulative.dates[int(crossing[0])].isoformat() if crossing.size else None

    config = {
        "subcommand": "trend", "region": region, "metric": metric,
        "sma_window": sma_window, "horizon": horizon,
        "align_threshold": align_threshold, "max_p": max_p, "max_q": max_q,
        "search": "exhaustive" if exhaustive else "stepwise",
    }
    provenance = provenance_block(config, {"timeseries": timeseries_path})

    payload = forecast_payload(result, search.model.order, search.model.aic)
    payload.update({
        "region": region,
        "metric": metric,
        "aic_parameter_count_convention":
            "k in 2(p+q+k) counts the intercept only",
        "intercept": search.model.intercept,
        "ar_coefficients": list(search.model.ar_coefficients),
        "ma_coefficients": list(search.model.ma_coefficients),
        "innovation_variance": search.model.innovation_variance,
        "log_likelihood": search.model.log_likelihood,
        "candidates_evaluated": len(search.candidates),
        "candidates_skipped": search.n_skipped,
        "aligned_day0_date": day0,
        "provenance": provenance,
    })
    out_path = _out_dir(out)
    write_json(out_path / "trend.json", payload)

    last_date = increments.dates[-1]
    forecast_dates = [last_date + datetime.timedelta(days=h)
                      for h in range(1, horizon + 1)]
    sma_by_date = dict(zip(sma.dates, sma.values))
    rows = []
    for date, value in zip(increments.dates, increments.values):
        sma_value = sma_by_date.get(date)
        rows.append([date.isoformat(), repr(float(value)),
                     repr(float(sma_value)) if sma_value is not None else "",
                     "", "", ""])
    for date, point, lo, hi in zip(forecast_dates, result.point,
                                   result.lower95, result.upper95):
        rows.append([date.isoformat(), "", "", repr(float(point)),
                     repr(float(lo)), repr(float(hi))])
    write_csv(out_path / "trend.csv",
              ["date", "observed_increment", "sma", "forecast_point",
               "forecast_lower95", "forecast_upper95"],
              rows, provenance)

    svg = svgplot.trend_svg(
        increments.values, sma_window - 1, sma.values,
        result.point, result.lower95, result.upper95,
        title=f"{region} daily new {metric}: trend and {horizon}-day forecast",
        provenance=provenance,
    )
    (out_path / "trend.svg").write_text(svg)
    order = search.model.order
    click.echo(
        f"selected ARIMA({order.p},{order.d},{order.q}), "
        f"AIC {search.model.aic:.2f}; wrote {out_path / 'trend.json'}"
    )


@main.command()
@click.option("--linelist", "linelist_path", type=click.Path(exists=True),
              required=True, help="Patient line-list CSV.")
@click.option("--dictionary", "dictionary_path", type=click.Path(exists=True),
              default=None, help="Symptom dictionary JSON; default: bundled.")
@click.option("--n-max", default=4, show_default=True,
              help="Largest n-gram size for the frequency report.")
@click.option("--top", default=50, show_default=True,
              help="Rows to keep in the n-gram report.")
@click.option("--out", default="out", show_default=True)
@_reporting_errors
def symptoms(linelist_path, dictionary_path, n_max, top, out):
    """Symptom prevalence scores (0-10 min-max of indicator sums) plus an
    n-gram frequency report for dictionary curation."""
    records = load_line_list(linelist_path)
    dictionary = SymptomDictionary.load(dictionary_path)
    indicators = build_indicator_matrix(records, dictionary)
    sums = indicators.column_sums()
    scores, degenerate = minmax_scale(sums)

    order = sorted(range(len(sums)), key=lambda i: (-sums[i],
                                                    indicators.columns[i]))
    config = {"subcommand": "symptoms", "n_max": n_max, "top": top,
              "dictionary": dictionary_path or "bundled"}
    inputs = {"linelist": linelist_path}
    if dictionary_path:
        inputs["dictionary"] = dictionary_path
    provenance = provenance_block(config, inputs)

    out_path = _out_dir(out)
    write_csv(out_path / "symptoms.csv",
              ["symptom", "raw_count", "score_0_10"],
              [[indicators.columns[i], int(sums[i]), repr(float(scores[i]))]
               for i in order],
              provenance)

    corpus = [r.symptom_text for r in records if r.symptom_text is not None]
    grams = ngram_frequencies(corpus, n_max=n_max)[:top]
    write_csv(out_path / "ngrams.csv", ["n", "gram", "count"],
              [[n, gram, count] for n, gram, count in grams], provenance)

    svg = svgplot.horizontal_bar_svg(
        [indicators.columns[i] for i in order],
        [float(scores[i]) for i in order],
        title="Common symptoms (relative prevalence, 0-10)",
        x_label="min-max scaled indicator sum"
        + (" [degenerate: all sums equal]" if degenerate else ""),
        provenance=provenance,
    )
    (out_path / "symptoms.svg").write_text(svg)
    click.echo(f"wrote {out_path / 'symptoms.csv'} "
               f"({indicators.n_rows} records with symptom text)")


@main.command()
@click.option("--linelist", "linelist_path", type=click.Path(exists=True),
              required=True)
@click.option("--dictionary", "dictionary_path", type=click.Path(exists=True),
              default=None)
@click.option("--k", "k_folds", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--ridge", default=0.0, show_default=True,
              help="Optional L2 stabilizer for separable data.")
@click.option("--out", default="out", show_default=True)
@_reporting_errors
def risk(linelist_path, dictionary_path, k_folds, seed, ridge, out):
    """Logistic-regression risk factors with Wald statistics, stratified
    k-fold accuracy, and pooled ROC."""
    records = load_line_list(linelist_path)
    dictionary = SymptomDictionary.load(dictionary_path)
    indicators = build_indicator_matrix(records, dictionary,
                                        include_missing_text=True)
    design = riskmodel.build_design_matrix(records, indicators)
    fit = riskmodel.fit_logistic(design, ridge=ridge)
    cv = riskmodel.kfold_cross_validate(design, k=k_folds, seed=seed,
                                        ridge=ridge)

    config = {"subcommand": "risk", "k": k_folds, "ridge": ridge,
              "dictionary": dictionary_path or "bundled"}
    inputs = {"linelist": linelist_path}
    if dictionary_path:
        inputs["dictionary"] = dictionary_path
    provenance = provenance_block(config, inputs, seed=seed)

    out_path = _out_dir(out)
    table = fit.coefficient_table()
    write_csv(out_path / "risk_coefficients.csv",
              ["variable", "estimate", "std_error", "z_value", "p_value",
               "separation_flag"],
              [[r["variable"], repr(r["estimate"]), repr(r["std_error"]),
                repr(r["z_value"]), repr(r["p_value"]),
                int(r["separation_flag"])] for r in table],
              provenance)
    write_json(out_path / "risk.json", {
        "coefficients": table,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "log_likelihood": fit.log_likelihood,
        "n_rows": design.n_rows,
        "n_excluded": design.n_excluded,
        "exclusions": design.exclusions,
        "cv": {
            "k": cv.k,
            "fold_accuracies": list(cv.fold_accuracies),
            "mean_accuracy": cv.mean_accuracy,
            "accuracy_std": cv.accuracy_std,
            "auroc": cv.auroc,
        },
        "provenance": provenance,
    })
    write_csv(out_path / "roc.csv", ["fpr", "tpr"],
              [[repr(fpr), repr(tpr)] for fpr, tpr in cv.roc_points],
              provenance)
    svg = svgplot.roc_svg(cv.roc_points, cv.auroc,
                          title=f"Pooled {k_folds}-fold ROC",
                          provenance=provenance)
    (out_path / "roc.svg").write_text(svg)
    click.echo(
        f"fit on {design.n_rows} rows ({design.n_excluded} excluded); "
        f"CV accuracy {cv.mean_accuracy:.3f} +/- {cv.accuracy_std:.3f}, "
        f"AUROC {cv.auroc:.3f}"
    )


@main.command()
@click.option("--linelist", "linelist_path", type=click.Path(exists=True),
              required=True)
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--out", default="out", show_default=True)
@_reporting_errors
def demog(linelist_path, alpha, out):
    """Demographic comparisons of outcome groups: F-test and Welch t-test on
    age, chi-square on sex vs outcome, and QQ points per group."""
    records = load_line_list(linelist_path)
    active_ages = [r.age for r in records
                   if r.outcome == OUTCOME_OTHER and r.age is not None]
    died_ages = [r.age for r in records
                 if r.outcome == OUTCOME_DIED and r.age is not None]

    f_res = stattest.f_test_variance(active_ages, died_ages, alpha=alpha)
    t_res = stattest.welch_t_test(active_ages, died_ages, alpha=alpha)

    counts = {(sex, outcome): 0
              for sex in ("male", "female")
              for outcome in (OUTCOME_OTHER, OUTCOME_DIED)}
    for r in records:
        if r.sex is not None and r.outcome is not None:
            counts[(r.sex, r.outcome)] += 1
    table = stattest.ContingencyTable((
        (counts[("male", OUTCOME_OTHER)], counts[("male", OUTCOME_DIED)]),
        (counts[("female", OUTCOME_OTHER)], counts[("female", OUTCOME_DIED)]),
    ))
    chi_res = stattest.chi_square_independence(table, alpha=alpha)

    config = {"subcommand": "demog", "alpha": alpha}
    provenance = provenance_block(config, {"linelist": linelist_path})
    payload = {
        "ages": {
            "n_active_or_recovered": len(active_ages),
            "n_died": len(died_ages),
        },
        "f_test": f_res.to_dict(),
        "welch_t": t_res.to_dict(),
        "chi_square": {
            "rows": ["male", "female"],
            "columns": [OUTCOME_OTHER, OUTCOME_DIED],
            "table": [list(row) for row in table.counts],
            **chi_res.to_dict(),
        },
        "qq": {
            OUTCOME_OTHER: [[t, q] for t, q in stattest.qq_points(active_ages)],
            OUTCOME_DIED: [[t, q] for t, q in stattest.qq_points(died_ages)],
        },
        "provenance": provenance,
    }
    out_path = _out_dir(out)
    write_json(out_path / "demographics.json", payload)
    click.echo(
        f"F={f_res.statistic:.4f} (p={f_res.p_value:.4g}), "
        f"t={t_res.statistic:.4f} (p={t_res.p_value:.4g}), "
        f"X2={chi_res.statistic:.4f} (p={chi_res.p_value:.4g}); "
        f"wrote {out_path / 'demographics.json'}"
    )


if __name__ == "__main__":
    main()
