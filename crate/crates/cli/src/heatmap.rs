//! Token shading for `explain`: terminal colours and a standalone HTML page.

/// Shade per token in `[0, 1]`, linear in the weight and scaled so the
/// largest non-aspect weight is 1. Aspect tokens get `None`.
pub fn shades(weights: &[f64], aspect: std::ops::Range<usize>) -> Vec<Option<f64>> {
    let max = weights
        .iter()
        .enumerate()
        .filter(|(i, _)| !aspect.contains(i))
        .map(|(_, &w)| w)
        .fold(0.0, f64::max);
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            if aspect.contains(&i) {
                None
            } else if max > 0.0 {
                Some(w / max)
            } else {
                Some(0.0)
            }
        })
        .collect()
}

/// Red channel stays full; green and blue fall with the shade.
fn rgb(shade: f64) -> (u8, u8, u8) {
    let other = (255.0 * (1.0 - shade.clamp(0.0, 1.0))).round() as u8;
    (255, other, other)
}

pub fn ansi(tokens: &[String], shades: &[Option<f64>]) -> String {
    let mut out = Vec::with_capacity(tokens.len());
    for (tok, shade) in tokens.iter().zip(shades) {
        out.push(match shade {
            // Aspect: underlined, default colours.
            None => format!("\x1b[4m{tok}\x1b[0m"),
            Some(s) => {
                let (r, g, b) = rgb(*s);
                format!("\x1b[48;2;{r};{g};{b}m\x1b[38;2;0;0;0m{tok}\x1b[0m")
            }
        });
    }
    out.join(" ")
}

pub fn plain(tokens: &[String], shades: &[Option<f64>]) -> String {
    tokens
        .iter()
        .zip(shades)
        .map(|(tok, shade)| match shade {
            None => format!("[{tok}]"),
            Some(s) => format!("{tok}({s:.2})"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn html(tokens: &[String], shades: &[Option<f64>], weights: &[f64], caption: &str) -> String {
    let mut body = String::new();
    for ((tok, shade), w) in tokens.iter().zip(shades).zip(weights) {
        let style = match shade {
            None => "text-decoration:underline".to_owned(),
            Some(s) => {
                let (r, g, b) = rgb(*s);
                format!("background:rgb({r},{g},{b})")
            }
        };
        body += &format!(
            "<span class=\"tok\" style=\"{style}\" title=\"{w}\">{}</span>\n",
            escape(tok)
        );
    }
    format!(
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>proximity weights</title>\
         <style>.tok{{padding:2px 4px;margin:1px;font-family:monospace}}</style></head>\n\
         <body><p>{}</p>\n<p>\n{body}</p></body></html>\n",
        escape(caption)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_non_aspect_weight_is_full_intensity() {
        let w = [0.875, 0.0, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25];
        let s = shades(&w, 1..2);
        assert_eq!(s[1], None);
        assert_eq!(s[0], Some(1.0));
        assert_eq!(s[7], Some(0.25 / 0.875));
        for k in 2..7 {
            assert!(s[k].unwrap() > s[k + 1].unwrap());
        }
    }

    #[test]
    fn aspect_only_sentence_has_no_shaded_tokens() {
        assert_eq!(shades(&[0.0, 0.0], 0..2), vec![None, None]);
        assert_eq!(shades(&[0.0, 0.0], 0..1), vec![None, Some(0.0)]);
    }

    #[test]
    fn html_escapes_tokens() {
        let page = html(&["<b>".into()], &[Some(0.5)], &[0.5], "a & b");
        assert!(page.contains("&lt;b&gt;"));
        assert!(page.contains("a &amp; b"));
    }
}
