use crate::error::{Error, Result};

/// Ground-truth class per pixel: 0 = unlabeled, 1..=C = class id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMask {
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl LabelMask {
    /// Builds a mask; class names default to `class 1`, `class 2`, ...
    pub fn new(labels: Vec<usize>, class_names: Option<Vec<String>>) -> Result<Self> {
        let max = labels.iter().copied().max().unwrap_or(0);
        let class_count = class_names.as_ref().map_or(max, Vec::len);
        if class_count == 0 {
            return Err(Error::Data("mask contains no class".into()));
        }
        if max > class_count {
            return Err(Error::Format(format!(
                "label {max} exceeds the {class_count} named classes"
            )));
        }
        let mut seen = vec![false; class_count + 1];
        for &l in &labels {
            seen[l] = true;
        }
        if let Some(missing) = (1..=class_count).find(|&c| !seen[c]) {
            return Err(Error::Data(format!("class {missing} has no pixels")));
        }
        let class_names = class_names
            .unwrap_or_else(|| (1..=class_count).map(|c| format!("class {c}")).collect());
        Ok(LabelMask {
            labels,
            class_names,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of pixels in each class, indexed by `class - 1`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.class_count()];
        for &l in self.labels.iter().filter(|&&l| l > 0) {
            sizes[l - 1] += 1;
        }
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_unlabeled_rejected() {
        assert!(LabelMask::new(vec![0, 0, 0], None).is_err());
    }

    #[test]
    fn gap_in_class_ids_rejected() {
        let err = LabelMask::new(vec![0, 1, 3], None).unwrap_err();
        assert!(err.to_string().contains("class 2"));
    }

    #[test]
    fn names_bound_class_count() {
        let names = vec!["roof".to_string(), "grass".to_string()];
        let m = LabelMask::new(vec![2, 1, 0], Some(names.clone())).unwrap();
        assert_eq!(m.class_sizes(), vec![1, 1]);
        assert!(LabelMask::new(vec![1, 1, 0], Some(names)).is_err());
    }
}
