use std::fmt;
use std::str::FromStr;

use super::StabilizerCode;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

// Layout:
//   [[n,k,d]] css=<bool>
//   one generator per line
//   LX
//   one logical X per line
//   LZ
//   one logical Z per line
// Blank lines and `#` comments are ignored.

impl fmt::Display for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[[{},{},{}]] css={}", self.n, self.k, self.d, self.is_css)?;
        for g in &self.generators {
            writeln!(f, "{g}")?;
        }
        writeln!(f, "LX")?;
        for l in &self.logical_x {
            writeln!(f, "{l}")?;
        }
        writeln!(f, "LZ")?;
        for l in &self.logical_z {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn parse_header(line: &str, no: usize) -> Result<(usize, usize, usize, bool)> {
    let (params, rest) = line
        .strip_prefix("[[")
        .and_then(|s| s.split_once("]]"))
        .ok_or_else(|| Error::parse(no, "expected header `[[n,k,d]] css=<bool>`"))?;
    let nums: Vec<usize> = params
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(no, format!("bad code parameters: {e}")))?;
    if nums.len() != 3 {
        return Err(Error::parse(no, "expected three code parameters"));
    }
    let css = match rest.trim() {
        "" => false,
        s => s
            .strip_prefix("css=")
            .and_then(|v| v.parse::<bool>().ok())
            .ok_or_else(|| Error::parse(no, format!("bad header suffix `{s}`")))?,
    };
    Ok((nums[0], nums[1], nums[2], css))
}

impl FromStr for StabilizerCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty code file"))?;
        let (n, k, d, is_css) = parse_header(header, no)?;
        let mut sections: [Vec<PauliString>; 3] = Default::default();
        let mut current = 0;
        for (no, line) in lines {
            match line {
                "LX" if current == 0 => current = 1,
                "LZ" if current == 1 => current = 2,
                "LX" | "LZ" => return Err(Error::parse(no, format!("unexpected section `{line}`"))),
                _ => {
                    let p: PauliString = line.parse().map_err(|e| Error::parse(no, format!("{e}")))?;
                    if p.n() != n {
                        return Err(Error::parse(no, format!("expected {n} qubits, found {}", p.n())));
                    }
                    sections[current].push(p);
                }
            }
        }
        let [generators, logical_x, logical_z] = sections;
        if logical_x.len() != k || logical_z.len() != k {
            return Err(Error::parse(
                no,
                format!(
                    "k = {k} but found {} logical X and {} logical Z",
                    logical_x.len(),
                    logical_z.len()
                ),
            ));
        }
        Ok(StabilizerCode {
            n,
            k,
            d,
            generators,
            logical_x,
            logical_z,
            is_css,
        })
    }
}

impl StabilizerCode {
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn read_from(path: &std::path::Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        for c in [
            StabilizerCode::repetition(5).unwrap(),
            StabilizerCode::triangular_color(5).unwrap(),
        ] {
            let text = c.to_text();
            let back: StabilizerCode = text.parse().unwrap();
            assert_eq!(back, c);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn parses_comments_and_signs() {
        let text = "# rep\n[[3,1,1]] css=true\n-ZZ_\n+_ZZ\nLX\nXXX\nLZ\nZ__ # single\n";
        let c: StabilizerCode = text.parse().unwrap();
        assert!(c.generators[0].is_negative());
        assert_eq!(c.logical_z[0].to_string(), "+Z__");
    }

    #[test]
    fn reports_line_of_bad_generator() {
        let text = "[[3,1,1]]\nZZ\nLX\nXXX\nLZ\nZZZ\n";
        match text.parse::<StabilizerCode>() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
