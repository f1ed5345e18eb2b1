use std::fmt::{self, Debug, Display};

/// Per-bit record of a list decode.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<V> {
    /// 1-based bit index.
    pub bit_index: usize,
    pub frozen: bool,
    /// `L × 2` metrics; inactive paths report the saturated value.
    pub metrics: Vec<[V; 2]>,
    pub active: Vec<bool>,
    /// Parent and bit per slot, when a selection took place.
    pub selection: Option<(Vec<usize>, Vec<u8>)>,
    /// Pointer rows after the step (stages `1..n−1`), if the decoder has them.
    pub pointers: Option<Vec<Vec<usize>>>,
}

impl<V: PartialEq> TraceRecord<V> {
    /// Same metrics and same survivor choice, ignoring pointer rows.
    pub fn same_decisions(&self, other: &Self) -> bool {
        self.bit_index == other.bit_index
            && self.metrics == other.metrics
            && self.active == other.active
            && self.selection == other.selection
    }
}

fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl<V: Debug> Display for TraceRecord<V> {
    /// `i=<bit> <F|A> M=<l0b0>/<l0b1>;... [P=<parents> U=<bits>] [ptr=<row>|<row>]`
    /// with 1-based path and memory indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={} {}", self.bit_index, if self.frozen { 'F' } else { 'A' })?;
        let metrics: Vec<String> = self
            .metrics
            .iter()
            .zip(&self.active)
            .map(|(m, &a)| if a { format!("{:?}/{:?}", m[0], m[1]) } else { "-".into() })
            .collect();
        write!(f, " M={}", metrics.join(";"))?;
        if let Some((parents, bits)) = &self.selection {
            write!(f, " P={} U={}", join(parents.iter().map(|p| p + 1)), join(bits))?;
        }
        if let Some(rows) = &self.pointers {
            let rows: Vec<String> = rows.iter().map(|r| join(r.iter().map(|p| p + 1))).collect();
            write!(f, " ptr={}", rows.join("|"))?;
        }
        Ok(())
    }
}

/// Writes one line per record.
pub fn write_trace<V: Debug, W: std::io::Write>(records: &[TraceRecord<V>], mut w: W) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{r}")?;
    }
    Ok(())
}
