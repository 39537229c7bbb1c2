use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::primes::{factorize, gcd};
use super::ArithError;

/// Largest modulus for which explicit value tables are built.
pub const MAX_CHARACTER_MODULUS: u64 = 10_000;

/// A Dirichlet character stored as an explicit table of values mod `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    modulus: u64,
    index: Vec<u64>,
    values: Vec<Complex64>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Exponent vector with respect to the unit-group generators.
    pub fn index(&self) -> &[u64] {
        &self.index
    }

    /// Values at the residues `0..q`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.index.iter().all(|&k| k == 0)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// `χ(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.modulus > 2 && self.value(self.modulus - 1).re < 0.0
    }

    /// Short label such as `chi:4:1`.
    pub fn label(&self) -> String {
        let idx: Vec<String> = self.index.iter().map(|k| k.to_string()).collect();
        if idx.is_empty() {
            format!("chi:{}:0", self.modulus)
        } else {
            format!("chi:{}:{}", self.modulus, idx.join(","))
        }
    }
}

/// One cyclic factor of `(Z/qZ)^*`: the prime-power modulus, generator and order.
#[derive(Debug, Clone, Copy)]
struct CyclicFactor {
    modulus: u64,
    generator: u64,
    order: u64,
}

fn cyclic_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, e) in factorize(q) {
        let pe = p.pow(e);
        if p == 2 {
            match e {
                1 => {}
                2 => out.push(CyclicFactor {
                    modulus: 4,
                    generator: 3,
                    order: 2,
                }),
                _ => {
                    out.push(CyclicFactor {
                        modulus: pe,
                        generator: pe - 1,
                        order: 2,
                    });
                    out.push(CyclicFactor {
                        modulus: pe,
                        generator: 5,
                        order: pe / 4,
                    });
                }
            }
        } else {
            out.push(CyclicFactor {
                modulus: pe,
                generator: primitive_root_prime_power(p, e),
                order: pe / p * (p - 1),
            });
        }
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let phi = p - 1;
    let divisors: Vec<u64> = factorize(phi).into_iter().map(|(f, _)| f).collect();
    let g = (2..p)
        .find(|&g| divisors.iter().all(|&f| pow_mod(g, phi / f, p) != 1))
        .unwrap_or(1);
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// Orders of the cyclic factors of `(Z/qZ)^*` used to index characters.
pub fn unit_group_orders(q: u64) -> Vec<u64> {
    cyclic_factors(q).iter().map(|f| f.order).collect()
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `exp(2πi num/den)` with exact values at multiples of a quarter turn.
fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if (4 * num) % den == 0 {
        return match 4 * num / den {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * num as f64 / den as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// Builds the character of modulus `q` with generator exponents `index`.
///
/// The all-zero index is the principal character.
pub fn dirichlet_character(q: u64, index: &[u64]) -> Result<DirichletCharacter, ArithError> {
    if q == 0 || q > MAX_CHARACTER_MODULUS {
        return Err(ArithError::InvalidIndex {
            modulus: q,
            index: index.to_vec(),
            orders: Vec::new(),
        });
    }
    let factors = cyclic_factors(q);
    let orders: Vec<u64> = factors.iter().map(|f| f.order).collect();
    if index.len() != factors.len() || index.iter().zip(&orders).any(|(&k, &o)| k >= o) {
        return Err(ArithError::InvalidIndex {
            modulus: q,
            index: index.to_vec(),
            orders,
        });
    }

    // discrete logarithm tables, one per cyclic factor
    let mut logs: Vec<Vec<u64>> = Vec::with_capacity(factors.len());
    let mut i = 0;
    while i < factors.len() {
        let f = factors[i];
        if f.modulus >= 8 && f.modulus.is_power_of_two() {
            // (Z/2^e)^* = <-1> x <5>
            let g = factors[i + 1];
            let mut sign_log = vec![0u64; f.modulus as usize];
            let mut five_log = vec![0u64; f.modulus as usize];
            let mut x = 1u64;
            for k in 0..g.order {
                five_log[x as usize] = k;
                five_log[(f.modulus - x) as usize] = k;
                sign_log[(f.modulus - x) as usize] = 1;
                x = x * 5 % f.modulus;
            }
            logs.push(sign_log);
            logs.push(five_log);
            i += 2;
        } else {
            let mut table = vec![0u64; f.modulus as usize];
            let mut x = 1u64;
            for k in 0..f.order {
                table[x as usize] = k;
                x = x * f.generator % f.modulus;
            }
            logs.push(table);
            i += 1;
        }
    }

    let den = orders.iter().fold(1, |acc, &o| lcm(acc, o));
    let values = (0..q)
        .map(|a| {
            if gcd(a, q) != 1 {
                return Complex64::new(0.0, 0.0);
            }
            let num = factors
                .iter()
                .zip(&logs)
                .zip(index)
                .fold(0u64, |acc, ((f, table), &k)| {
                    let l = table[(a % f.modulus) as usize];
                    (acc + k * l % f.order * (den / f.order)) % den
                });
            root_of_unity(num, den)
        })
        .collect();
    Ok(DirichletCharacter {
        modulus: q,
        index: index.to_vec(),
        values,
    })
}

/// Every character of modulus `q`, principal first.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>, ArithError> {
    let orders = unit_group_orders(q);
    let total: u64 = orders.iter().product();
    (0..total)
        .map(|mut code| {
            let index: Vec<u64> = orders
                .iter()
                .map(|&o| {
                    let k = code % o;
                    code /= o;
                    k
                })
                .collect();
            dirichlet_character(q, &index)
        })
        .collect()
}
