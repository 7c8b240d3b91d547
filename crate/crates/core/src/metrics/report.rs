/// Result of evaluating one model on one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    /// Mean of `per_sequence_errors`.
    pub mse: f64,
    /// Per-frame ROC area; `None` when the data carries no labels or only
    /// one class.
    pub auc_roc: Option<f64>,
    pub inference_ms_per_sequence: Option<f64>,
    pub per_sequence_errors: Vec<f64>,
    pub config_fingerprint: String,
}

impl EvalReport {
    /// Builds a report from per-sequence errors; `mse` is their mean.
    pub fn from_errors(per_sequence_errors: Vec<f64>, auc_roc: Option<f64>, fingerprint: &str) -> Self {
        let mse = per_sequence_errors.iter().sum::<f64>() / per_sequence_errors.len().max(1) as f64;
        Self {
            mse,
            auc_roc,
            inference_ms_per_sequence: None,
            per_sequence_errors,
            config_fingerprint: fingerprint.to_string(),
        }
    }

    /// Flat `key=value` record. Absent values are written as `n/a`.
    pub fn render(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"));
        let errors: Vec<String> = self.per_sequence_errors.iter().map(|e| format!("{e}")).collect();
        format!(
            "mse={}\nauc_roc={}\ninference_ms_per_sequence={}\nsequences={}\nconfig_fingerprint={}\nper_sequence_errors={}\n",
            self.mse,
            opt(self.auc_roc),
            opt(self.inference_ms_per_sequence),
            self.per_sequence_errors.len(),
            self.config_fingerprint,
            errors.join(",")
        )
    }
}
