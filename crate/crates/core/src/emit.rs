//! Canonical text emission for artifacts.
//!
//! Every artifact this crate writes must be byte-identical across runs with
//! the same config and seed, so all float formatting funnels through one
//! place: decimal scientific notation with 17 significant digits (enough to
//! round-trip any f64 bit pattern), infinities spelled `"inf"` / `"-inf"`,
//! and object fields emitted in a fixed order chosen by the caller.

/// Format a finite float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    debug_assert!(v.is_finite(), "fmt_f64 on non-finite {v}");
    format!("{:.16e}", v)
}

/// Format an extended real as a bare JSON token: finite values as numbers,
/// infinities as the strings `"inf"` / `"-inf"`.
pub fn fmt_ext(v: f64) -> String {
    if v == f64::INFINITY {
        "\"inf\"".to_string()
    } else if v == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        fmt_f64(v)
    }
}

/// Parse what [`fmt_ext`] produced (used by the JSON loaders).
pub fn parse_ext(tok: &serde_json::Value) -> Option<f64> {
    match tok {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) if s == "inf" => Some(f64::INFINITY),
        serde_json::Value::String(s) if s == "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

/// Minimal JSON writer with caller-controlled field order.
///
/// serde_json's maps reorder keys and its float formatting is
/// shortest-round-trip; artifacts need a fixed 17-digit convention instead,
/// so emission is hand-assembled here.
pub struct JsonW {
    buf: String,
    stack: Vec<bool>, // per open container: whether an element was written
    pending_key: bool,
}

impl JsonW {
    pub fn new() -> Self {
        JsonW {
            buf: String::new(),
            stack: Vec::new(),
            pending_key: false,
        }
    }

    fn sep(&mut self) {
        if self.pending_key {
            self.pending_key = false;
            return;
        }
        if let Some(started) = self.stack.last_mut() {
            if *started {
                self.buf.push(',');
            }
            *started = true;
        }
    }

    pub fn obj_open(&mut self) -> &mut Self {
        self.sep();
        self.buf.push('{');
        self.stack.push(false);
        self
    }

    pub fn obj_close(&mut self) -> &mut Self {
        self.stack.pop();
        self.buf.push('}');
        self
    }

    pub fn arr_open(&mut self) -> &mut Self {
        self.sep();
        self.buf.push('[');
        self.stack.push(false);
        self
    }

    pub fn arr_close(&mut self) -> &mut Self {
        self.stack.pop();
        self.buf.push(']');
        self
    }

    pub fn key(&mut self, k: &str) -> &mut Self {
        self.sep();
        self.buf.push('"');
        self.buf.push_str(k);
        self.buf.push_str("\":");
        self.pending_key = true;
        self
    }

    pub fn raw(&mut self, tok: &str) -> &mut Self {
        self.sep();
        self.buf.push_str(tok);
        self
    }

    pub fn num(&mut self, v: f64) -> &mut Self {
        let t = fmt_f64(v);
        self.raw(&t)
    }

    pub fn ext(&mut self, v: f64) -> &mut Self {
        let t = fmt_ext(v);
        self.raw(&t)
    }

    pub fn int(&mut self, v: i64) -> &mut Self {
        let t = v.to_string();
        self.raw(&t)
    }

    pub fn boolean(&mut self, v: bool) -> &mut Self {
        self.raw(if v { "true" } else { "false" })
    }

    pub fn string(&mut self, s: &str) -> &mut Self {
        self.sep();
        self.buf.push('"');
        for c in s.chars() {
            match c {
                '"' => self.buf.push_str("\\\""),
                '\\' => self.buf.push_str("\\\\"),
                '\n' => self.buf.push_str("\\n"),
                c if (c as u32) < 0x20 => {
                    self.buf.push_str(&format!("\\u{:04x}", c as u32));
                }
                c => self.buf.push(c),
            }
        }
        self.buf.push('"');
        self
    }

    pub fn finish(self) -> String {
        debug_assert!(self.stack.is_empty(), "unbalanced JSON containers");
        self.buf
    }
}

impl Default for JsonW {
    fn default() -> Self {
        Self::new()
    }
}
