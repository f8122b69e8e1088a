//! Privacy-utility landscape: strategies in the (ε*, utility) plane, their
//! Pareto frontier and its concave hull, kernel density marginals, and
//! JSON / CSV / SVG renderings.
//!
//! The frontier is reported twice. `dominance_set` holds every strategy no
//! other strategy beats on both axes; `hull_set` keeps only the vertices of
//! the upper concave hull of that set, the strategies no convex combination
//! of others improves on.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::svg::Plot;

pub const LANDSCAPE_SCHEMA: &str = "epsilon-star.landscape/1";

/// Tag whose presence marks a differentially private training strategy.
pub const DP_TAG: &str = "dp_epsilon";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyPoint {
    pub id: String,
    pub utility: f64,
    pub eps_star_mean: f64,
    pub eps_star_min: f64,
    pub eps_star_max: f64,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
}

impl StrategyPoint {
    /// Aggregates per-instance values of one strategy.
    pub fn from_repeats(
        id: impl Into<String>,
        utility: f64,
        eps_values: &[f64],
        tags: BTreeMap<String, String>,
    ) -> Result<Self> {
        if eps_values.is_empty() {
            return Err(Error::EmptySample("a strategy needs at least one epsilon* value".into()));
        }
        let p = Self {
            id: id.into(),
            utility,
            eps_star_mean: eps_values.iter().sum::<f64>() / eps_values.len() as f64,
            eps_star_min: eps_values.iter().copied().fold(f64::INFINITY, f64::min),
            eps_star_max: eps_values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            tags,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.utility, self.eps_star_mean, self.eps_star_min, self.eps_star_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain(format!("strategy `{}` has a non-finite coordinate", self.id)));
        }
        // the mean of rounded values may sit an ulp outside [min, max]
        let slack = 1e-12 * self.eps_star_max.abs().max(1.0);
        if !(self.eps_star_min >= 0.0
            && self.eps_star_min <= self.eps_star_mean + slack
            && self.eps_star_mean <= self.eps_star_max + slack)
        {
            return Err(Error::domain(format!(
                "strategy `{}` needs 0 <= min <= mean <= max epsilon*",
                self.id
            )));
        }
        Ok(())
    }

    pub fn is_dp(&self) -> bool {
        self.tags.contains_key(DP_TAG)
    }

    fn eps(&self, objective: FrontierObjective) -> f64 {
        match objective {
            FrontierObjective::Mean => self.eps_star_mean,
            FrontierObjective::Max => self.eps_star_max,
        }
    }
}

/// One audited model instance, before aggregation into strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceScore {
    pub strategy: String,
    pub utility: f64,
    pub epsilon_star: f64,
    pub tags: BTreeMap<String, String>,
}

/// Groups instances by strategy in first-appearance order. Utility is the
/// instance mean; tags come from the first instance of each strategy.
pub fn aggregate_strategies(instances: &[InstanceScore]) -> Result<Vec<StrategyPoint>> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&InstanceScore>> = BTreeMap::new();
    for inst in instances {
        let g = groups.entry(inst.strategy.as_str()).or_default();
        if g.is_empty() {
            order.push(inst.strategy.as_str());
        }
        g.push(inst);
    }
    order
        .into_iter()
        .map(|id| {
            let g = &groups[id];
            let eps: Vec<f64> = g.iter().map(|i| i.epsilon_star).collect();
            let utility = g.iter().map(|i| i.utility).sum::<f64>() / g.len() as f64;
            StrategyPoint::from_repeats(id, utility, &eps, g[0].tags.clone())
        })
        .collect()
}

/// Which ε* summary the frontier minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontierObjective {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub objective: FrontierObjective,
    /// Nondominated ids by increasing ε*.
    pub dominance_set: Vec<String>,
    /// Hull vertex ids by increasing ε*.
    pub hull_set: Vec<String>,
}

/// `q` dominates `p`: utility no lower, ε* no higher, one of them strictly.
pub fn dominates(q: (f64, f64), p: (f64, f64)) -> bool {
    let ((uq, eq), (up, ep)) = (q, p);
    uq >= up && eq <= ep && (uq > up || eq < ep)
}

/// Dominance frontier and hull, computed on `objective`.
pub fn pareto_frontier(points: &[StrategyPoint], objective: FrontierObjective) -> Result<Frontier> {
    if points.is_empty() {
        return Err(Error::EmptySample("the landscape has no strategies".into()));
    }
    for p in points {
        p.validate()?;
    }
    // by ε* ascending, utility descending, id for a total order
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.eps(objective)
            .total_cmp(&pb.eps(objective))
            .then(pb.utility.total_cmp(&pa.utility))
            .then(pa.id.cmp(&pb.id))
    });

    // a point survives if it has the top utility among equal ε* and beats
    // every point with strictly smaller ε*
    let mut front: Vec<usize> = Vec::new();
    let mut best_below = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        let e = points[order[i]].eps(objective);
        let mut j = i;
        while j < order.len() && points[order[j]].eps(objective) == e {
            j += 1;
        }
        let top = points[order[i]].utility;
        if top > best_below {
            front.extend(order[i..j].iter().copied().filter(|&k| points[k].utility == top));
            best_below = top;
        }
        i = j;
    }

    // upper hull over (ε*, utility); along the frontier both coordinates rise
    let mut hull: Vec<usize> = Vec::new();
    for &k in &front {
        let p = (points[k].eps(objective), points[k].utility);
        if let Some(&last) = hull.last() {
            if (points[last].eps(objective), points[last].utility) == p {
                hull.push(k);
                continue;
            }
        }
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let pa = (points[a].eps(objective), points[a].utility);
            let pb = (points[b].eps(objective), points[b].utility);
            if pa == pb {
                break;
            }
            let cross = (pb.0 - pa.0) * (p.1 - pa.1) - (pb.1 - pa.1) * (p.0 - pa.0);
            if cross >= 0.0 {
                // b is on or below the chord from a to p
                let bp = pb;
                while hull.last().map_or(false, |&h| (points[h].eps(objective), points[h].utility) == bp) {
                    hull.pop();
                }
            } else {
                break;
            }
        }
        hull.push(k);
    }

    let ids = |v: &[usize]| v.iter().map(|&k| points[k].id.clone()).collect();
    Ok(Frontier {
        objective,
        dominance_set: ids(&front),
        hull_set: ids(&hull),
    })
}

/// Silverman's rule `1.06 σ̂ n^{-1/5}`, with the `n - 1` standard deviation.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::DegenerateSample(format!(
            "kernel density needs at least 2 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    if !(var > 0.0) {
        return Err(Error::DegenerateSample("kernel density over values with zero spread".into()));
    }
    Ok(1.06 * var.sqrt() * n.powf(-0.2))
}

/// Gaussian kernel density of `values`, evaluated at each grid point.
pub fn kde_marginal(values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    let h = silverman_bandwidth(values)?;
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * std::f64::consts::PI).sqrt());
    Ok(grid
        .iter()
        .map(|&x| {
            norm * values
                .iter()
                .map(|&v| {
                    let z = (x - v) / h;
                    (-0.5 * z * z).exp()
                })
                .sum::<f64>()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalAxis {
    Utility,
    EpsStar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginal {
    /// `dp` or `baseline`.
    pub category: String,
    pub axis: MarginalAxis,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

/// Densities of utility and mean ε* per category (`dp` when the
/// `dp_epsilon` tag is present, `baseline` otherwise) on a shared
/// `grid_points` grid spanning each axis. Categories with fewer than two
/// distinct values are left out.
pub fn marginals_by_dp(points: &[StrategyPoint], grid_points: usize) -> Vec<Marginal> {
    let mut out = Vec::new();
    for axis in [MarginalAxis::Utility, MarginalAxis::EpsStar] {
        let value = |p: &StrategyPoint| match axis {
            MarginalAxis::Utility => p.utility,
            MarginalAxis::EpsStar => p.eps_star_mean,
        };
        let all: Vec<f64> = points.iter().map(value).collect();
        let (lo, hi) = all
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let pad = 0.25 * (hi - lo).max(1e-6);
        let n = grid_points.max(2);
        let grid: Vec<f64> = (0..n)
            .map(|i| lo - pad + (hi - lo + 2.0 * pad) * i as f64 / (n - 1) as f64)
            .collect();
        for (category, dp) in [("baseline", false), ("dp", true)] {
            let vals: Vec<f64> = points.iter().filter(|p| p.is_dp() == dp).map(value).collect();
            if let Ok(density) = kde_marginal(&vals, &grid) {
                out.push(Marginal {
                    category: category.into(),
                    axis,
                    grid: grid.clone(),
                    density,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LandscapeFormat {
    Json,
    Csv,
    Svg,
}

impl FromStr for LandscapeFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(LandscapeFormat::Json),
            "csv" => Ok(LandscapeFormat::Csv),
            "svg" => Ok(LandscapeFormat::Svg),
            other => Err(Error::UnknownFormat(other.into())),
        }
    }
}

impl LandscapeFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            LandscapeFormat::Json => "json",
            LandscapeFormat::Csv => "csv",
            LandscapeFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeDocument {
    pub schema: String,
    pub points: Vec<StrategyPoint>,
    pub frontier: Frontier,
    pub marginals: Vec<Marginal>,
}

impl LandscapeDocument {
    pub fn new(points: Vec<StrategyPoint>, frontier: Frontier, marginals: Vec<Marginal>) -> Self {
        Self {
            schema: LANDSCAPE_SCHEMA.into(),
            points,
            frontier,
            marginals,
        }
    }
}

pub fn parse_landscape_json(text: &str) -> Result<LandscapeDocument> {
    let doc: LandscapeDocument = serde_json::from_str(text).map_err(|e| Error::Serialize(e.to_string()))?;
    if doc.schema != LANDSCAPE_SCHEMA {
        return Err(Error::Serialize(format!(
            "unsupported landscape schema `{}` (expected {LANDSCAPE_SCHEMA})",
            doc.schema
        )));
    }
    Ok(doc)
}

fn check_ids(points: &[StrategyPoint], frontier: &Frontier) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for p in points {
        if !seen.insert(p.id.as_str()) {
            return Err(Error::domain(format!("duplicate strategy id `{}`", p.id)));
        }
    }
    for id in frontier.dominance_set.iter().chain(&frontier.hull_set) {
        if !seen.contains(id.as_str()) {
            return Err(Error::domain(format!("frontier names unknown strategy `{id}`")));
        }
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the landscape as a document in `format`.
pub fn emit_landscape(
    points: &[StrategyPoint],
    frontier: &Frontier,
    marginals: &[Marginal],
    format: LandscapeFormat,
) -> Result<String> {
    check_ids(points, frontier)?;
    match format {
        LandscapeFormat::Json => {
            let doc = LandscapeDocument::new(points.to_vec(), frontier.clone(), marginals.to_vec());
            serde_json::to_string_pretty(&doc).map_err(|e| Error::Serialize(e.to_string()))
        }
        LandscapeFormat::Csv => {
            let mut out = String::from("id,utility,eps_star_mean,eps_star_min,eps_star_max,dominant,hull,tags\n");
            for p in points {
                let tags: Vec<String> = p.tags.iter().map(|(k, v)| format!("{k}={v}")).collect();
                out.push_str(&format!(
                    "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{}\n",
                    csv_field(&p.id),
                    p.utility,
                    p.eps_star_mean,
                    p.eps_star_min,
                    p.eps_star_max,
                    frontier.dominance_set.contains(&p.id),
                    frontier.hull_set.contains(&p.id),
                    csv_field(&tags.join(";"))
                ));
            }
            Ok(out)
        }
        LandscapeFormat::Svg => {
            let objective = frontier.objective;
            let e_hi = points.iter().map(|p| p.eps_star_max).fold(0.0, f64::max);
            let (u_lo, u_hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.utility), h.max(p.utility)));
            let mut plot = Plot::new((0.0, e_hi), (u_lo, u_hi));
            for p in points {
                let color = if p.is_dp() { "#1f77b4" } else { "#d62728" };
                plot.segment((p.eps_star_min, p.utility), (p.eps_star_max, p.utility), color);
                plot.point(p.eps(objective), p.utility, color, &p.id);
            }
            let hull: Vec<(f64, f64)> = frontier
                .hull_set
                .iter()
                .filter_map(|id| points.iter().find(|p| &p.id == id))
                .map(|p| (p.eps(objective), p.utility))
                .collect();
            plot.polyline(&hull, "black");
            Ok(plot.render("epsilon*", "utility", "privacy-utility landscape (blue: DP, red: baseline)"))
        }
    }
}
