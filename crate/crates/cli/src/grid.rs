//! Corruption sweep and ablation grids.

use mocap_core::ModelConfig;

use crate::error::{Failure, Outcome};

/// Corruption levels for the robustness sweep; the table is their product.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub noise: Vec<f64>,
    pub occlusion: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            noise: vec![0.10, 0.15, 0.20, 0.25, 0.30],
            occlusion: vec![0.05, 0.10, 0.15, 0.20],
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Outcome<()> {
        for (name, levels) in [("noise", &self.noise), ("occlusion", &self.occlusion)] {
            if levels.is_empty() {
                return Err(Failure::Usage(format!("{name} levels are empty")));
            }
            if levels.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Failure::Usage(format!("{name} levels must lie in [0, 1]")));
            }
            if levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Failure::Usage(format!("{name} levels must be strictly ascending")));
            }
        }
        Ok(())
    }

    /// `(noise, occlusion)` cells, noise-major.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.noise
            .iter()
            .flat_map(|&n| self.occlusion.iter().map(move |&o| (n, o)))
            .collect()
    }
}

/// Architecture and learning-rate options around a baseline setting.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationGrid {
    pub base_layers: usize,
    pub base_heads: usize,
    pub base_embed: usize,
    pub base_lr: f64,
    pub layers: Vec<usize>,
    pub heads: Vec<usize>,
    pub embeds: Vec<usize>,
    pub lrs: Vec<f64>,
}

/// One ablation configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub name: &'static str,
    pub layers: usize,
    pub heads: usize,
    pub embed: usize,
    pub lr: f64,
}

impl AblationGrid {
    /// 6 layers, 8 heads, width 128, lr 0.001 with the published options.
    pub fn paper() -> Self {
        Self {
            base_layers: 6,
            base_heads: 8,
            base_embed: 128,
            base_lr: 0.001,
            layers: vec![4, 6, 8],
            heads: vec![4, 8, 12],
            embeds: vec![64, 128, 256],
            lrs: vec![0.0005, 0.001],
        }
    }

    /// The same shape around the desk preset.
    pub fn desk() -> Self {
        Self {
            base_layers: 2,
            base_heads: 4,
            base_embed: 32,
            base_lr: 0.002,
            layers: vec![1, 2, 3],
            heads: vec![2, 4, 8],
            embeds: vec![16, 32, 64],
            lrs: vec![0.001, 0.002],
        }
    }

    pub fn validate(&self) -> Outcome<()> {
        if self.layers.is_empty() || self.heads.is_empty() || self.embeds.is_empty() || self.lrs.is_empty() {
            return Err(Failure::Usage("ablation option sets must be non-empty".into()));
        }
        if self.layers.contains(&0) || self.heads.contains(&0) || self.embeds.iter().any(|e| *e == 0 || e % 2 != 0) {
            return Err(Failure::Usage("layers and heads must be positive, widths positive and even".into()));
        }
        if self.lrs.iter().any(|l| !(*l > 0.0)) {
            return Err(Failure::Usage("learning rates must be positive".into()));
        }
        Ok(())
    }

    /// The baseline followed by one variant per axis: fewest layers, most
    /// heads, widest embedding, lowest learning rate. Axes whose extreme
    /// equals the baseline are skipped.
    pub fn rows(&self) -> Vec<AblationRow> {
        let base = AblationRow {
            name: "Baseline",
            layers: self.base_layers,
            heads: self.base_heads,
            embed: self.base_embed,
            lr: self.base_lr,
        };
        let mut rows = vec![base.clone()];
        let low_layers = *self.layers.iter().min().expect("validated");
        if low_layers != base.layers {
            rows.push(AblationRow {
                name: "Low Layers",
                layers: low_layers,
                ..base.clone()
            });
        }
        let high_heads = *self.heads.iter().max().expect("validated");
        if high_heads != base.heads {
            rows.push(AblationRow {
                name: "High Heads",
                heads: high_heads,
                ..base.clone()
            });
        }
        let high_embed = *self.embeds.iter().max().expect("validated");
        if high_embed != base.embed {
            rows.push(AblationRow {
                name: "High Embedding",
                embed: high_embed,
                ..base.clone()
            });
        }
        let low_lr = self.lrs.iter().copied().fold(f64::INFINITY, f64::min);
        if low_lr != base.lr {
            rows.push(AblationRow {
                name: "Low LR",
                lr: low_lr,
                ..base
            });
        }
        rows
    }
}

impl AblationRow {
    /// `base` with this row's shape. The feed-forward width follows the
    /// embedding at 4×; when the width does not split evenly across heads
    /// each head gets `embed / heads` (rounded down, at least 1).
    pub fn apply(&self, base: &ModelConfig) -> ModelConfig {
        let mut c = base.clone().with_embed_dim(self.embed);
        c.num_layers = self.layers;
        c.num_heads = self.heads;
        c.learning_rate = self.lr;
        c.head_dim = if self.embed % self.heads == 0 {
            None
        } else {
            Some((self.embed / self.heads).max(1))
        };
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_grid_gives_the_five_table_rows() {
        let rows = AblationGrid::paper().rows();
        let names: Vec<&str> = rows.iter().map(|r| r.name).collect();
        assert_eq!(names, ["Baseline", "Low Layers", "High Heads", "High Embedding", "Low LR"]);
        let shape = |r: &AblationRow| (r.layers, r.heads, r.embed, r.lr);
        assert_eq!(shape(&rows[0]), (6, 8, 128, 0.001));
        assert_eq!(shape(&rows[1]), (4, 8, 128, 0.001));
        assert_eq!(shape(&rows[2]), (6, 12, 128, 0.001));
        assert_eq!(shape(&rows[3]), (6, 8, 256, 0.001));
        assert_eq!(shape(&rows[4]), (6, 8, 128, 0.0005));
    }

    #[test]
    fn twelve_heads_get_an_explicit_width() {
        let row = &AblationGrid::paper().rows()[2];
        let c = row.apply(&ModelConfig::paper(30));
        assert_eq!(c.head_dim, Some(10));
        c.validate().unwrap();
        let wide = AblationGrid::paper().rows()[3].apply(&ModelConfig::paper(30));
        assert_eq!((wide.embed_dim, wide.ffn_dim, wide.head_dim), (256, 1024, None));
    }

    #[test]
    fn sweep_cells_and_validation() {
        let g = SweepGrid::default();
        g.validate().unwrap();
        assert_eq!(g.cells().len(), 20);
        assert_eq!(g.cells()[1], (0.10, 0.10));
        let bad = SweepGrid {
            noise: vec![0.2, 0.1],
            occlusion: vec![0.1],
        };
        assert!(bad.validate().is_err());
        let bad = SweepGrid {
            noise: vec![0.2, 1.5],
            occlusion: vec![0.1],
        };
        assert!(bad.validate().is_err());
    }
}
