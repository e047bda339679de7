//! Aggregate statistics over effective evaluations.
//!
//! Per-criterion and total-score summaries, perceived-origin groups, Welch's
//! t-test, one-way ANOVA, quadratic-weighted Cohen's kappa between raters and
//! the ground-truth vs. perceived-origin confusion matrix. p-values come from
//! [`crate::stats`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::csvio::write_record;
use crate::rubric::{CriterionKey, Evaluation, LikertScore, Origin};
use crate::stats::{f_survival, student_t_two_sided};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("each group needs at least two samples")]
    TooFewSamples,
    #[error("at least two groups are required")]
    TooFewGroups,
    #[error("variance is zero, the test statistic is undefined")]
    DegenerateVariance,
    #[error("rating lists differ in length")]
    LengthMismatch,
    #[error("at least two rated items are required")]
    TooFewItems,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n − 1 denominator).
fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// n, mean and sample SD; mean absent when n = 0, SD absent when n < 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreStats {
    pub n: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

impl ScoreStats {
    pub fn of(xs: &[f64]) -> Self {
        ScoreStats {
            n: xs.len(),
            mean: (!xs.is_empty()).then(|| mean(xs)),
            sd: (xs.len() >= 2).then(|| variance(xs).sqrt()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub criterion: CriterionKey,
    #[serde(flatten)]
    pub stats: ScoreStats,
}

pub fn criterion_summaries(evaluations: &[Evaluation]) -> Vec<CriterionSummary> {
    CriterionKey::ALL
        .into_iter()
        .map(|key| {
            let xs: Vec<f64> = evaluations
                .iter()
                .map(|e| f64::from(e.scores.get(key).get()))
                .collect();
            CriterionSummary {
                criterion: key,
                stats: ScoreStats::of(&xs),
            }
        })
        .collect()
}

/// Total scores partitioned by perceived origin. Every origin is present.
pub fn group_totals_by_origin(evaluations: &[Evaluation]) -> BTreeMap<Origin, Vec<u32>> {
    let mut groups: BTreeMap<Origin, Vec<u32>> =
        Origin::ALL.into_iter().map(|o| (o, Vec::new())).collect();
    for e in evaluations {
        groups.entry(e.origin).or_default().push(e.total_score());
    }
    groups
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

/// Welch's unequal-variance two-sample t-test, two-sided.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (variance(a) / na, variance(b) / nb);
    if va == 0.0 && vb == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let se2 = va + vb;
    let t = (mean(a) - mean(b)) / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTest {
        t,
        df,
        p: student_t_two_sided(t, df),
    })
}

/// Equal-variance (pooled) two-sample t-test, two-sided.
pub fn pooled_t_test(a: &[f64], b: &[f64]) -> Result<TTest, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples);
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / df;
    if pooled == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t = (mean(a) - mean(b)) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(TTest {
        t,
        df,
        p: student_t_two_sided(t, df),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anova {
    pub f: f64,
    pub df1: f64,
    pub df2: f64,
    pub p: f64,
}

pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<Anova, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    if groups.iter().any(|g| g.as_ref().len() < 2) {
        return Err(StatsError::TooFewSamples);
    }
    let n: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / n as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for g in groups {
        let g = g.as_ref();
        let m = mean(g);
        between += g.len() as f64 * (m - grand).powi(2);
        within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    if within == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let df1 = (groups.len() - 1) as f64;
    let df2 = (n - groups.len()) as f64;
    let f = (between / df1) / (within / df2);
    Ok(Anova {
        f,
        df1,
        df2,
        p: f_survival(f, df1, df2),
    })
}

/// Quadratic-weighted Cohen's kappa over the 1..=5 categories.
///
/// `None` when expected disagreement is zero (both raters constant on the
/// same category). Uses κ = 1 − n·Σ(aₖ−bₖ)² / Σₖ Σₗ (aₖ−bₗ)², which is the
/// matrix definition with the observed and chance tables summed out.
pub fn pairwise_weighted_kappa(
    a: &[LikertScore],
    b: &[LikertScore],
) -> Result<Option<f64>, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch);
    }
    if a.len() < 2 {
        return Err(StatsError::TooFewItems);
    }
    let n = a.len() as i64;
    let (mut sa, mut sb, mut sa2, mut sb2, mut sd2) = (0i64, 0i64, 0i64, 0i64, 0i64);
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (i64::from(x.get()), i64::from(y.get()));
        sa += x;
        sb += y;
        sa2 += x * x;
        sb2 += y * y;
        sd2 += (x - y) * (x - y);
    }
    let expected = n * sa2 - 2 * sa * sb + n * sb2;
    if expected == 0 {
        return Ok(None);
    }
    Ok(Some(1.0 - (n * sd2) as f64 / expected as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionAgreement {
    pub criterion: CriterionKey,
    /// Mean over rater pairs with a defined kappa.
    pub mean_kappa: Option<f64>,
    pub pairs_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub criteria: Vec<CriterionAgreement>,
    /// Evaluator pairs sharing at least two documents.
    pub rater_pairs: usize,
}

/// Mean pairwise weighted kappa per criterion. `None` when no two evaluators
/// share at least two documents.
pub fn agreement_report(evaluations: &[Evaluation]) -> Option<AgreementReport> {
    let mut by_rater: BTreeMap<&str, BTreeMap<&str, &Evaluation>> = BTreeMap::new();
    for e in evaluations {
        by_rater
            .entry(e.evaluator_name.as_str())
            .or_default()
            .insert(e.document_id.as_str(), e);
    }
    let raters: Vec<_> = by_rater.values().collect();
    let mut kappas: Vec<Vec<f64>> = vec![Vec::new(); CriterionKey::ALL.len()];
    let mut rater_pairs = 0;
    for (i, first) in raters.iter().enumerate() {
        for second in &raters[i + 1..] {
            let shared: Vec<(&Evaluation, &Evaluation)> = first
                .iter()
                .filter_map(|(doc, e)| second.get(doc).map(|o| (*e, *o)))
                .collect();
            if shared.len() < 2 {
                continue;
            }
            rater_pairs += 1;
            for key in CriterionKey::ALL {
                let (a, b): (Vec<_>, Vec<_>) = shared
                    .iter()
                    .map(|(x, y)| (x.scores.get(key), y.scores.get(key)))
                    .unzip();
                if let Ok(Some(k)) = pairwise_weighted_kappa(&a, &b) {
                    kappas[key.index()].push(k);
                }
            }
        }
    }
    if rater_pairs == 0 {
        return None;
    }
    Some(AgreementReport {
        criteria: CriterionKey::ALL
            .into_iter()
            .map(|key| {
                let ks = &kappas[key.index()];
                CriterionAgreement {
                    criterion: key,
                    mean_kappa: (!ks.is_empty()).then(|| mean(ks)),
                    pairs_used: ks.len(),
                }
            })
            .collect(),
        rater_pairs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no ground truth for documents: {}", .0.join(", "))]
pub struct MissingGroundTruth(pub Vec<String>);

/// Ground truth (rows: human, ai) against perceived origin (columns: human, ai, unsure).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginConfusion {
    pub matrix: [[usize; 3]; 2],
    /// correct / (total − unsure); absent when every assessment is unsure.
    pub accuracy: Option<f64>,
}

impl OriginConfusion {
    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum()
    }
}

/// `truth` maps document ids to `Human` or `Ai`.
pub fn origin_confusion(
    evaluations: &[Evaluation],
    truth: &HashMap<String, Origin>,
) -> Result<OriginConfusion, MissingGroundTruth> {
    let mut matrix = [[0usize; 3]; 2];
    let mut missing = BTreeSet::new();
    for e in evaluations {
        let row = match truth.get(&e.document_id) {
            Some(Origin::Human) => 0,
            Some(Origin::Ai) => 1,
            _ => {
                missing.insert(e.document_id.clone());
                continue;
            }
        };
        matrix[row][e.origin.index()] += 1;
    }
    if !missing.is_empty() {
        return Err(MissingGroundTruth(missing.into_iter().collect()));
    }
    let correct = matrix[0][0] + matrix[1][1];
    let decided: usize = matrix.iter().map(|r| r[0] + r[1]).sum();
    Ok(OriginConfusion {
        matrix,
        accuracy: (decided > 0).then(|| correct as f64 / decided as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginTotals {
    pub origin: Origin,
    #[serde(flatten)]
    pub stats: ScoreStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub evaluation_count: usize,
    pub evaluator_count: usize,
    pub document_count: usize,
    pub criteria: Vec<CriterionSummary>,
    pub total: ScoreStats,
    pub by_origin: Vec<OriginTotals>,
    /// Human-perceived vs. AI-perceived totals; unsure excluded.
    pub welch: Option<TTest>,
    /// All three perceived-origin groups.
    pub anova: Option<Anova>,
    pub agreement: Option<AgreementReport>,
    pub confusion: Option<OriginConfusion>,
}

/// Every component whose preconditions fail is left absent.
pub fn summary_report(
    evaluations: &[Evaluation],
    truth: &HashMap<String, Origin>,
) -> SummaryReport {
    let totals: Vec<f64> = evaluations
        .iter()
        .map(|e| f64::from(e.total_score()))
        .collect();
    let groups: BTreeMap<Origin, Vec<f64>> = group_totals_by_origin(evaluations)
        .into_iter()
        .map(|(o, v)| (o, v.into_iter().map(f64::from).collect()))
        .collect();
    let welch = welch_t_test(&groups[&Origin::Human], &groups[&Origin::Ai]).ok();
    let anova = one_way_anova(&groups.values().collect::<Vec<_>>()).ok();
    let confusion = if evaluations.is_empty() {
        None
    } else {
        origin_confusion(evaluations, truth).ok()
    };
    SummaryReport {
        evaluation_count: evaluations.len(),
        evaluator_count: evaluations
            .iter()
            .map(|e| &e.evaluator_name)
            .collect::<BTreeSet<_>>()
            .len(),
        document_count: evaluations
            .iter()
            .map(|e| &e.document_id)
            .collect::<BTreeSet<_>>()
            .len(),
        criteria: criterion_summaries(evaluations),
        total: ScoreStats::of(&totals),
        by_origin: groups
            .iter()
            .map(|(o, v)| OriginTotals {
                origin: *o,
                stats: ScoreStats::of(v),
            })
            .collect(),
        welch,
        anova,
        agreement: agreement_report(evaluations),
        confusion,
    }
}

pub const REPORT_CSV_HEADER: [&str; 6] = ["section", "name", "n", "mean", "sd", "value"];

/// Flat CSV rendering with a fixed set of rows; absent values are empty cells.
pub fn report_csv(report: &SummaryReport) -> Vec<u8> {
    fn num(v: Option<f64>) -> String {
        v.map(|v| v.to_string()).unwrap_or_default()
    }
    let mut rows: Vec<[String; 6]> = Vec::new();
    let stats_row = |section: &str, name: &str, s: &ScoreStats| {
        [
            section.to_string(),
            name.to_string(),
            s.n.to_string(),
            num(s.mean),
            num(s.sd),
            String::new(),
        ]
    };
    let value_row = |section: &str, name: &str, v: String| {
        [
            section.to_string(),
            name.to_string(),
            String::new(),
            String::new(),
            String::new(),
            v,
        ]
    };

    rows.push(value_row(
        "count",
        "evaluations",
        report.evaluation_count.to_string(),
    ));
    rows.push(value_row(
        "count",
        "evaluators",
        report.evaluator_count.to_string(),
    ));
    rows.push(value_row(
        "count",
        "documents",
        report.document_count.to_string(),
    ));
    for c in &report.criteria {
        rows.push(stats_row("criterion", c.criterion.as_str(), &c.stats));
    }
    rows.push(stats_row("total", "all", &report.total));
    for g in &report.by_origin {
        rows.push(stats_row("total", g.origin.as_str(), &g.stats));
    }
    let w = report.welch;
    rows.push(value_row("welch", "t", num(w.map(|w| w.t))));
    rows.push(value_row("welch", "df", num(w.map(|w| w.df))));
    rows.push(value_row("welch", "p", num(w.map(|w| w.p))));
    let a = report.anova;
    rows.push(value_row("anova", "f", num(a.map(|a| a.f))));
    rows.push(value_row("anova", "df1", num(a.map(|a| a.df1))));
    rows.push(value_row("anova", "df2", num(a.map(|a| a.df2))));
    rows.push(value_row("anova", "p", num(a.map(|a| a.p))));
    let ag = report.agreement.as_ref();
    for key in CriterionKey::ALL {
        let c = ag.map(|ag| &ag.criteria[key.index()]);
        let mut row = value_row("kappa", key.as_str(), num(c.and_then(|c| c.mean_kappa)));
        row[2] = c.map(|c| c.pairs_used.to_string()).unwrap_or_default();
        rows.push(row);
    }
    rows.push(value_row(
        "kappa",
        "rater_pairs",
        ag.map(|a| a.rater_pairs).unwrap_or(0).to_string(),
    ));
    let cm = report.confusion.as_ref();
    for (r, truth) in ["human", "ai"].iter().enumerate() {
        for assessed in Origin::ALL {
            rows.push(value_row(
                "confusion",
                &format!("{truth}_{}", assessed.as_str()),
                cm.map(|c| c.matrix[r][assessed.index()].to_string())
                    .unwrap_or_default(),
            ));
        }
    }
    rows.push(value_row(
        "confusion",
        "accuracy",
        num(cm.and_then(|c| c.accuracy)),
    ));

    let mut buf = Vec::new();
    write_record(&mut buf, REPORT_CSV_HEADER).expect("write to vec");
    for row in rows {
        write_record(&mut buf, row).expect("write to vec");
    }
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rubric::Scores;
    use chrono::Utc;

    fn eval(doc: &str, who: &str, values: [i64; 9], origin: Origin) -> Evaluation {
        Evaluation {
            document_id: doc.into(),
            evaluator_name: who.into(),
            scores: Scores::from_values(values).unwrap(),
            origin,
            timestamp: Utc::now(),
        }
    }

    fn likert(v: &[i64]) -> Vec<LikertScore> {
        v.iter().map(|&x| LikertScore::new(x).unwrap()).collect()
    }

    #[test]
    fn single_evaluation_summary() {
        let e = eval("d", "r", [5, 4, 3, 2, 1, 5, 4, 3, 2], Origin::Ai);
        let s = criterion_summaries(&[e]);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0].stats.mean, Some(5.0));
        assert_eq!(s[4].stats.mean, Some(1.0));
        assert!(s.iter().all(|c| c.stats.sd.is_none() && c.stats.n == 1));
    }

    #[test]
    fn two_evaluations_mean_and_sd() {
        let mut v1 = [3; 9];
        let mut v2 = [3; 9];
        v1[1] = 1;
        v2[1] = 5;
        let s = criterion_summaries(&[
            eval("a", "r", v1, Origin::Human),
            eval("b", "r", v2, Origin::Human),
        ]);
        assert_eq!(s[1].stats.mean, Some(3.0));
        assert!((s[1].stats.sd.unwrap() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_input_summaries() {
        let s = criterion_summaries(&[]);
        assert!(s.iter().all(|c| c.stats.n == 0 && c.stats.mean.is_none()));
        let g = group_totals_by_origin(&[]);
        assert_eq!(g.len(), 3);
        assert!(g.values().all(Vec::is_empty));
    }

    #[test]
    fn groups_one_each() {
        let g = group_totals_by_origin(&[
            eval("a", "r", [1; 9], Origin::Human),
            eval("b", "r", [2; 9], Origin::Ai),
            eval("c", "r", [3; 9], Origin::Unsure),
        ]);
        assert_eq!(g[&Origin::Human], vec![9]);
        assert_eq!(g[&Origin::Ai], vec![18]);
        assert_eq!(g[&Origin::Unsure], vec![27]);
    }

    #[test]
    fn welch_symmetric_identical_groups() {
        let r = welch_t_test(&[30.0, 32.0, 34.0], &[30.0, 32.0, 34.0]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn welch_errors() {
        assert_eq!(
            welch_t_test(&[9.0, 9.0, 9.0], &[45.0, 45.0, 45.0]),
            Err(StatsError::DegenerateVariance)
        );
        assert_eq!(
            welch_t_test(&[1.0], &[2.0, 3.0]),
            Err(StatsError::TooFewSamples)
        );
    }

    #[test]
    fn welch_one_constant_group_is_fine() {
        let r = welch_t_test(&[9.0, 9.0, 9.0], &[20.0, 22.0, 25.0]).unwrap();
        assert!(r.t < 0.0 && r.p < 0.05);
        assert!((r.df - 2.0).abs() < 1e-12);
    }

    #[test]
    fn anova_equal_means() {
        let r = one_way_anova(&[vec![1.0, 5.0], vec![2.0, 4.0], vec![3.0, 3.0]]).unwrap();
        assert_eq!(r.f, 0.0);
        assert_eq!(r.p, 1.0);
        assert_eq!((r.df1, r.df2), (2.0, 3.0));
    }

    #[test]
    fn anova_errors() {
        assert_eq!(
            one_way_anova(&[vec![1.0, 2.0]]),
            Err(StatsError::TooFewGroups)
        );
        assert_eq!(
            one_way_anova(&[vec![1.0, 2.0], vec![3.0]]),
            Err(StatsError::TooFewSamples)
        );
        assert_eq!(
            one_way_anova(&[vec![1.0, 1.0], vec![3.0, 3.0]]),
            Err(StatsError::DegenerateVariance)
        );
    }

    #[test]
    fn kappa_perfect_and_undefined() {
        let a = likert(&[1, 2, 3, 4, 5, 3]);
        assert_eq!(pairwise_weighted_kappa(&a, &a).unwrap(), Some(1.0));
        let c = likert(&[3, 3, 3, 3]);
        assert_eq!(pairwise_weighted_kappa(&c, &c).unwrap(), None);
        assert_eq!(
            pairwise_weighted_kappa(&a, &c),
            Err(StatsError::LengthMismatch)
        );
        assert_eq!(
            pairwise_weighted_kappa(&a[..1], &a[..1]),
            Err(StatsError::TooFewItems)
        );
    }

    #[test]
    fn kappa_hand_worked() {
        // a = (1,2,3), b = (1,3,3): Σ(a−b)² = 1; n = 3
        // Σₖₗ(aₖ−bₗ)² = 3·14 − 2·6·7 + 3·19 = 15  ⇒  κ = 1 − 3/15 = 0.8
        let k = pairwise_weighted_kappa(&likert(&[1, 2, 3]), &likert(&[1, 3, 3]))
            .unwrap()
            .unwrap();
        assert!((k - 0.8).abs() < 1e-15);
    }

    #[test]
    fn agreement_needs_overlap() {
        let one = [
            eval("a", "r1", [1; 9], Origin::Human),
            eval("b", "r1", [2; 9], Origin::Human),
        ];
        assert!(agreement_report(&one).is_none());
        let mut two = one.to_vec();
        two.push(eval("a", "r2", [1; 9], Origin::Ai));
        two.push(eval("b", "r2", [2; 9], Origin::Ai));
        let rep = agreement_report(&two).unwrap();
        assert_eq!(rep.rater_pairs, 1);
        assert!(rep.criteria.iter().all(|c| c.mean_kappa == Some(1.0)));
    }

    #[test]
    fn confusion_examples() {
        let truth: HashMap<String, Origin> = [
            ("a".to_string(), Origin::Human),
            ("b".to_string(), Origin::Ai),
        ]
        .into();
        let right = [
            eval("a", "r", [3; 9], Origin::Human),
            eval("b", "r", [3; 9], Origin::Ai),
        ];
        let c = origin_confusion(&right, &truth).unwrap();
        assert_eq!(c.accuracy, Some(1.0));
        assert_eq!(c.matrix, [[1, 0, 0], [0, 1, 0]]);

        let unsure = [
            eval("a", "r", [3; 9], Origin::Unsure),
            eval("b", "r", [3; 9], Origin::Unsure),
        ];
        let c = origin_confusion(&unsure, &truth).unwrap();
        assert_eq!(c.accuracy, None);
        assert_eq!(c.matrix, [[0, 0, 1], [0, 0, 1]]);

        let err = origin_confusion(&[eval("zz", "r", [3; 9], Origin::Ai)], &truth).unwrap_err();
        assert_eq!(err, MissingGroundTruth(vec!["zz".into()]));
    }

    #[test]
    fn empty_summary_all_absent() {
        let r = summary_report(&[], &HashMap::new());
        assert_eq!(r.evaluation_count, 0);
        assert_eq!(r.total.n, 0);
        assert!(r.welch.is_none() && r.anova.is_none());
        assert!(r.agreement.is_none() && r.confusion.is_none());
    }

    #[test]
    fn single_evaluator_three_documents() {
        let evals = [
            eval("a", "r", [3; 9], Origin::Human),
            eval("b", "r", [4; 9], Origin::Ai),
            eval("c", "r", [5; 9], Origin::Human),
        ];
        let r = summary_report(&evals, &HashMap::new());
        assert_eq!(r.criteria[0].stats.n, 3);
        assert!(r.welch.is_none() && r.anova.is_none() && r.agreement.is_none());
        assert_eq!(r.total.mean, Some(36.0));
    }

    #[test]
    fn report_csv_empty_golden() {
        let csv = String::from_utf8(report_csv(&summary_report(&[], &HashMap::new()))).unwrap();
        let expected = include_str!("../tests/data/summary_empty.csv");
        assert_eq!(csv, expected.replace('\n', "\r\n"));
    }
}
