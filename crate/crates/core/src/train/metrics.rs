use std::fmt;

use crate::corpus::Polarity;

/// Accuracy, macro-F1 and per-class scores derived from a confusion matrix
/// (rows are gold labels, columns predictions).
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalReport {
    /// Scores from a square confusion matrix. Any 0/0 resolves to 0.
    pub fn from_confusion(confusion: Vec<Vec<usize>>) -> Self {
        let k = confusion.len();
        assert!(confusion.iter().all(|r| r.len() == k), "confusion matrix must be square");
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
        let mut precision = Vec::with_capacity(k);
        let mut recall = Vec::with_capacity(k);
        let mut f1 = Vec::with_capacity(k);
        for c in 0..k {
            let tp = confusion[c][c];
            let predicted: usize = confusion.iter().map(|r| r[c]).sum();
            let actual: usize = confusion[c].iter().sum();
            let p = ratio(tp, predicted);
            let r = ratio(tp, actual);
            precision.push(p);
            recall.push(r);
            f1.push(if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) });
        }
        let macro_f1 = if k == 0 { 0.0 } else { f1.iter().sum::<f64>() / k as f64 };
        EvalReport {
            accuracy: ratio(correct, total),
            macro_f1,
            precision,
            recall,
            f1,
            confusion,
        }
    }

    pub fn from_predictions(gold: &[usize], predicted: &[usize], num_classes: usize) -> Self {
        assert_eq!(gold.len(), predicted.len());
        let mut confusion = vec![vec![0; num_classes]; num_classes];
        for (&g, &p) in gold.iter().zip(predicted) {
            confusion[g][p] += 1;
        }
        EvalReport::from_confusion(confusion)
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    /// `metric<TAB>value` lines.
    pub fn to_kv_text(&self) -> String {
        let mut s = format!(
            "accuracy\t{:.6}\nmacro_f1\t{:.6}\ntotal\t{}\n",
            self.accuracy,
            self.macro_f1,
            self.total()
        );
        for (c, name) in class_names(self.f1.len()).iter().enumerate() {
            s += &format!(
                "precision.{name}\t{:.6}\nrecall.{name}\t{:.6}\nf1.{name}\t{:.6}\n",
                self.precision[c], self.recall[c], self.f1[c]
            );
        }
        for (g, row) in self.confusion.iter().enumerate() {
            for (p, count) in row.iter().enumerate() {
                s += &format!("confusion.{g}.{p}\t{count}\n");
            }
        }
        s
    }
}

fn class_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|c| Polarity::from_index(c).map_or_else(|| format!("class{c}"), |p| p.to_string()))
        .collect()
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "accuracy  {:>8.4}", self.accuracy)?;
        writeln!(f, "macro-F1  {:>8.4}", self.macro_f1)?;
        writeln!(f)?;
        writeln!(f, "{:<10} {:>9} {:>9} {:>9}", "class", "precision", "recall", "f1")?;
        let names = class_names(self.f1.len());
        for (c, name) in names.iter().enumerate() {
            writeln!(
                f,
                "{name:<10} {:>9.4} {:>9.4} {:>9.4}",
                self.precision[c], self.recall[c], self.f1[c]
            )?;
        }
        writeln!(f)?;
        write!(f, "{:<10}", "gold\\pred")?;
        for name in &names {
            write!(f, " {name:>9}")?;
        }
        writeln!(f)?;
        for (name, row) in names.iter().zip(&self.confusion) {
            write!(f, "{name:<10}")?;
            for count in row {
                write!(f, " {count:>9}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
