//! The classification table as data. Templates are written in heat variables
//! (`x`, `tau`, `phi`); `s` is the sign of a two-sign row, `psi` the auxiliary
//! variable and `F` the arbitrary function evaluated at its argument.

use super::{Constraint, EntryData, FnArg, FunctionData, ParamData, Patch};

const fn p(name: &'static str, lo: f64, hi: f64) -> ParamData {
    ParamData {
        name,
        draw: (lo, hi),
        literal_only: false,
    }
}

const fn literal_only(name: &'static str, lo: f64, hi: f64) -> ParamData {
    ParamData {
        name,
        draw: (lo, hi),
        literal_only: true,
    }
}

const A: ParamData = p("A", 0.3, 1.5);
const B: ParamData = p("B", 0.2, 1.2);
const GAMMA: ParamData = p("Gamma", 0.2, 1.0);
const DELTA: ParamData = p("Delta", 0.2, 1.0);
const E: ParamData = p("E", 0.2, 1.0);

const TRANSLATION: [&str; 3] = ["0", "1", "0"];

const NOT_0_M1_M2: &[f64] = &[0.0, -1.0, -2.0];

const CONVEX_SQUARE: FunctionData = FunctionData {
    arg: FnArg::Psi,
    convex: true,
    default: "psi^2",
};

const PSI_38: &str = "exp(Gamma*x^2/2)*x^((2-4*A)/4)*phi + Delta";
const FHAT_38: &str =
    "-exp(-Gamma*x^2/2)*x^(A-5/2)*psi*(4*A*ln(abs(psi)) - x^2*(B*x^2 + 8*A*Gamma)/4) \
     + Delta/4*exp(-Gamma*x^2/2)*x^(A-5/2)*(3 - 8*A + 4*(Gamma*x^2 - A)^2)";
const FHAT_4: &str = "phi*(A*ln(abs(phi)) + B*x^2)";

pub(super) static ENTRIES: [EntryData; 22] = [
    EntryData {
        id: "A_1",
        params: &[],
        constraints: &[],
        signed: false,
        function: Some(FunctionData { arg: FnArg::Source, convex: false, default: "phi^2" }),
        psi: None,
        fhat: "F",
        generators: &[TRANSLATION],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_2_2_1",
        params: &[A],
        constraints: &[],
        signed: false,
        function: Some(CONVEX_SQUARE),
        psi: Some("exp(x^2/8)*x^A*phi"),
        fhat: "-exp(-x^2/8)/(4*x^(A+2))*(x^2*(x^2/4 + 2*A - 1)*psi + F)",
        generators: &[TRANSLATION, ["exp(tau)*x", "2*exp(tau)", "-exp(tau)*(x^2/4 + A)*phi"]],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_2_2_2",
        params: &[A, literal_only("B", 0.3, 1.5)],
        constraints: &[],
        signed: false,
        function: Some(FunctionData { arg: FnArg::Psi, convex: true, default: "psi^3" }),
        psi: Some("x^A*phi"),
        fhat: "F/x^(A+2)",
        generators: &[TRANSLATION, ["x", "2*tau", "-B*phi"]],
        patch: Some(Patch {
            fhat: None,
            psi: None,
            generators: Some(&[TRANSLATION, ["x", "2*tau", "-A*phi"]]),
            note: "scaling generator weight B replaced by the exponent A; the literal form is a symmetry only when B = A",
        }),
        reading: None,
    },
    EntryData {
        id: "A_2_2_3",
        params: &[p("A", 0.2, 1.0), p("B", 0.2, 1.0)],
        constraints: &[],
        signed: false,
        function: Some(CONVEX_SQUARE),
        psi: Some("exp((A*x + B)*x/2)*phi"),
        fhat: "-exp(-(A*x + B)*x/2)*(A*x*(A*x + B)*psi + F)",
        generators: &[TRANSLATION, ["2*exp(2*A*tau)", "0", "-exp(2*A*tau)*(2*A*x + B)*phi"]],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_2_2_4",
        params: &[A, B, GAMMA, DELTA],
        constraints: &[Constraint::NonZero("A"), Constraint::NonZero("B^2 + Gamma^2 + Delta^2")],
        signed: false,
        function: Some(FunctionData { arg: FnArg::X, convex: false, default: "sin(x)" }),
        psi: None,
        fhat: "-(F + A*ln((Delta + x*(Gamma*x + B))*phi))*phi",
        generators: &[TRANSLATION, ["0", "0", "exp(-A*tau)*phi"]],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_3_5_1",
        params: &[A, B, GAMMA, DELTA, E],
        constraints: &[Constraint::NonZero("A"), Constraint::NonZero("Gamma"), Constraint::NotIn("B", NOT_0_M1_M2)],
        signed: false,
        function: None,
        psi: Some("exp(A*(x + Delta)^2/2)*x^(-2/(B+1))*phi + E"),
        fhat: "-exp(-A*(x + Delta)^2/2)*x^(-2*B/(B+1))*(Gamma*abs(phi)^(-B) \
               + A*x^2*(A*(B+1)*(x + Delta)^2 - B - 5)/(B+1)*phi \
               - E*(A*(B+1)*x*(x*(A*(B+1)*(x + Delta)^2 - 5 - B) - 4*E) + 2*(1 - B))/(B+1)^2)",
        generators: &[
            TRANSLATION,
            [
                "exp(2*A*tau)",
                "0",
                "-exp(2*A*tau)*(A*(x + Delta)*phi + 2*E*x^(2/(B+1) - 1)*exp(-A*(x + Delta)^2/2)/(B+1))",
            ],
            [
                "2*exp(4*A*tau)*A*(x + Delta)",
                "exp(4*A*tau)",
                "-2*A*exp(4*A*tau)/(B+1)*((A*(B+1)*(x + Delta)^2 - 2)*phi \
                 + 2*Delta*E*x^(2/(B+1) - 1)*exp(-A*(x + Delta)^2/2))",
            ],
        ],
        patch: Some(Patch {
            fhat: Some(
                "-exp(-A*(x + Delta)^2/2)*x^(-2*B/(B+1))*(Gamma*abs(psi)^(-B) \
                 + A*x^2*(A*(B+1)*(x + Delta)^2 - B - 5)/(B+1)*psi \
                 - E*(A*(B+1)*x*(x*(A*(B+1)*(x + Delta)^2 - 5 - B) - 4*Delta) + 2*(1 - B))/(B+1)^2)",
            ),
            psi: None,
            generators: None,
            note: "source written in psi instead of phi in its first two terms, and -4E replaced by -4Delta",
        }),
        reading: Some("generator exponents written with t are read as tau"),
    },
    EntryData {
        id: "A_3_5_2",
        params: &[A, B],
        constraints: &[Constraint::NonZero("A"), Constraint::NotIn("B", NOT_0_M1_M2)],
        signed: true,
        function: None,
        psi: None,
        fhat: "(5 + B - s*x^2)/(B+1)^2*phi - A*exp(-s*x^2/2)*abs(phi)^(-B)",
        generators: &[
            TRANSLATION,
            ["exp(s*2*tau/(B+1))", "0", "-s/(B+1)*exp(s*2*tau/(B+1))*x*phi"],
            [
                "2*exp(s*4*tau/(B+1))*x",
                "s*exp(s*4*tau/(B+1))*(B+1)",
                "-s*2*exp(s*4*tau/(B+1))*(x^2 - s*2)*phi/(1+B)",
            ],
        ],
        patch: Some(Patch {
            fhat: Some("(s*(5 + B) - x^2)/(B+1)^2*phi - A*exp(-s*x^2/2)*abs(phi)^(-B)"),
            psi: None,
            generators: None,
            note: "linear coefficient (5 + B -/+ x^2) becomes (+/-(5 + B) - x^2); unchanged for the upper sign",
        }),
        reading: None,
    },
    EntryData {
        id: "A_3_5_3",
        params: &[A, B, GAMMA, DELTA],
        constraints: &[Constraint::NonZero("A"), Constraint::NotIn("B", NOT_0_M1_M2)],
        signed: false,
        function: None,
        psi: Some("exp(A*x)*x^(-2/(1+B))*phi + Delta"),
        fhat: "-exp(-Gamma*x)*x^(-2*B/(1+B))*(Delta*(2*(B+1) - (Gamma*(B+1)*x - 2)^2)/(B+1)^2 \
               + A*abs(psi)^(-B) + Gamma^2*x^2*psi)",
        generators: &[
            TRANSLATION,
            ["1", "0", "-(Gamma*phi + 2*Delta*exp(-Gamma*x)*x^((1-B)/(1+B))/(B+1))"],
            [
                "x + 2*Gamma*tau",
                "2*tau",
                "((2 - Gamma*(B+1)*(x + 2*Gamma*tau))*phi - 4*Gamma*Delta*tau*exp(-Gamma*x)*x^((1-B)/(B+1)))/(B+1)",
            ],
        ],
        patch: Some(Patch {
            fhat: None,
            psi: Some("exp(Gamma*x)*x^(-2/(1+B))*phi + Delta"),
            generators: None,
            note: "auxiliary variable uses exp(Gamma x) instead of exp(A x)",
        }),
        reading: None,
    },
    EntryData {
        id: "A_3_5_4",
        params: &[A, B, literal_only("Gamma", 0.2, 1.0)],
        constraints: &[Constraint::NotIn("A", NOT_0_M1_M2)],
        signed: false,
        function: None,
        psi: None,
        fhat: "-exp(-(A+1)*B*x)*abs(phi)^(-A) - B^2*phi",
        generators: &[
            TRANSLATION,
            ["1", "0", "-Gamma*phi"],
            ["x + 2*Gamma*tau", "2*tau", "-((1+A)*Gamma*(x + 2*Gamma*tau) - 2)*phi/(A+1)"],
        ],
        patch: Some(Patch {
            fhat: None,
            psi: None,
            generators: Some(&[
                TRANSLATION,
                ["1", "0", "-B*phi"],
                ["x + 2*B*tau", "2*tau", "-((1+A)*B*(x + 2*B*tau) - 2)*phi/(A+1)"],
            ]),
            note: "generator parameter Gamma, absent from the source, replaced by B",
        }),
        reading: None,
    },
    EntryData {
        id: "A_3_5_5",
        params: &[A, B],
        constraints: &[Constraint::NonZero("A")],
        signed: false,
        function: None,
        psi: None,
        fhat: "-B^2*phi - A*exp(-exp(B*x)*phi - B*x)/x^2 - 2*exp(-B*x)*(2*B*x + 1)/x^2",
        generators: &[
            TRANSLATION,
            ["1", "0", "-(B*phi + 2*exp(-B*x)/x)"],
            ["x + 2*B*tau", "2*tau", "-B*(4*tau*exp(-B*x)/x + (x + 2*B*tau)*phi)"],
        ],
        patch: None,
        reading: Some("source written with u is read with phi"),
    },
    EntryData {
        id: "A_3_5_6",
        params: &[A, B],
        constraints: &[Constraint::NonZero("A")],
        signed: false,
        function: None,
        psi: Some("exp(-B*x)*phi"),
        fhat: "-exp(B*x)*(A*exp(psi) + B^2*psi)",
        generators: &[
            TRANSLATION,
            ["1", "0", "B*phi"],
            ["x - 2*B*tau", "2*tau", "B*(x - 2*B*tau)*phi - 2*exp(B*x)"],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_3_5_7",
        params: &[],
        constraints: &[],
        signed: true,
        function: None,
        psi: None,
        fhat: "-s*exp(-s*x^2/2)/4*(4*exp(s*x^2)*phi^2 + (x^2 - s*11)*(x^2 + s))",
        generators: &[
            TRANSLATION,
            ["exp(s*2*tau)", "0", "s*exp(s*2*tau)*(exp(-s*x^2/2) - phi)*x"],
            [
                "2*exp(s*4*tau)*x",
                "s*exp(s*4*tau)",
                "2*exp(s*4*tau)*((s*2*x^2 + 3)*exp(-s*x^2/2) - (s*x^2 + 2)*phi)",
            ],
        ],
        patch: None,
        reading: Some("source written with u is read with phi"),
    },
    EntryData {
        id: "A_3_5_8",
        params: &[A, B],
        constraints: &[Constraint::NonZero("A")],
        signed: true,
        function: None,
        psi: Some("exp(s*x^2/2)*phi"),
        fhat: "-s*exp(-s*x^2/2)*(A/(x + B)^2*exp(-psi) + s*(s*x^2 - 1)*psi + 2*(1 - s*2*B*(x + B))/(x + B)^2)",
        generators: &[
            TRANSLATION,
            ["exp(s*2*tau)", "0", "-exp(s*2*tau)*(s*phi*x*(x + B) + 2*exp(-s*x^2/2))/(x + B)"],
            [
                "s*2*exp(s*4*tau)*x",
                "exp(s*4*tau)",
                "2*exp(s*4*tau)*(s*2*B*exp(-s*x^2/2) - phi*x^2*(x + B))/(x + B)",
            ],
        ],
        patch: Some(Patch {
            fhat: Some(
                "-exp(-s*x^2/2)*(A/(x + B)^2*exp(-psi) + s*(s*x^2 - 1)*psi + 2*(1 - s*2*B*(x + B))/(x + B)^2)",
            ),
            psi: None,
            generators: None,
            note: "leading sign -/+ becomes -; unchanged for the upper sign",
        }),
        reading: Some("generators written with u, t and d/dt are read with phi, tau and d/dtau"),
    },
    EntryData {
        id: "A_3_5_9",
        params: &[p("B", 0.3, 1.5)],
        constraints: &[],
        signed: false,
        function: None,
        psi: None,
        fhat: "-exp(B*x)*phi^2 - B^4/4*exp(-B*x)",
        generators: &[
            TRANSLATION,
            ["1", "0", "-B*phi"],
            ["x + 2*B*tau", "2*tau", "-((2 + B*x + 2*B^2*tau)*phi - B^2*exp(-B*x))"],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_3_5_10",
        params: &[A],
        constraints: &[Constraint::NonZero("A")],
        signed: true,
        function: None,
        psi: Some("exp(-s*x^2/2)*phi"),
        fhat: "-s*exp(s*x^2/2)*(A*exp(psi) + (s*x^2 + 1)*psi - 4)",
        generators: &[
            TRANSLATION,
            ["exp(-s*2*tau)", "0", "s*exp(-s*2*tau)*x*phi"],
            ["2*exp(-s*4*tau)*x", "-s*exp(-s*4*tau)", "-2*exp(-4*tau)*(2*exp(s*x^2/2) - s*x^2*phi)"],
        ],
        patch: Some(Patch {
            fhat: None,
            psi: None,
            generators: Some(&[
                TRANSLATION,
                ["exp(-s*2*tau)", "0", "s*exp(-s*2*tau)*x*phi"],
                ["2*exp(-s*4*tau)*x", "-s*exp(-s*4*tau)", "-2*exp(-s*4*tau)*(2*exp(s*x^2/2) - s*x^2*phi)"],
            ]),
            note: "exp(-4 tau) in the last generator becomes exp(-/+4 tau); unchanged for the upper sign",
        }),
        reading: Some("d/dt in the last generator is read as d/dtau"),
    },
    EntryData {
        id: "A_3_8_1",
        params: &[A, B, GAMMA, DELTA],
        constraints: &[Constraint::NonZero("A"), Constraint::Positive("B")],
        signed: false,
        function: None,
        psi: Some(PSI_38),
        fhat: FHAT_38,
        generators: &[
            TRANSLATION,
            [
                "2*sqrt(B)*x*cos(2*sqrt(B)*tau)",
                "2*sin(2*sqrt(B)*tau)",
                "B*(Delta*exp(-Gamma*x^2/2)*x^(A+3/2) + x^2*phi)*sin(2*sqrt(B)*tau) \
                 + sqrt(B)*(2*Gamma*Delta*exp(-Gamma*x^2/2)*x^(A+3/2) + (2*A - 1)*phi)*cos(2*sqrt(B)*tau)",
            ],
            [
                "-2*sqrt(B)*x*sin(2*sqrt(B)*tau)",
                "2*cos(2*sqrt(B)*tau)",
                "B*(Delta*exp(-Gamma*x^2/2)*x^(A+3/2) + x^2*phi)*cos(2*sqrt(B)*tau) \
                 - sqrt(B)*(2*Gamma*Delta*exp(-Gamma*x^2/2)*x^(A+3/2) + (2*A - 1)*phi)*sin(2*sqrt(B)*tau)",
            ],
        ],
        patch: None,
        reading: Some("cos(2 sqrt(B) t) and d/dt in the generators are read with tau"),
    },
    EntryData {
        id: "A_3_8_2",
        params: &[A, p("B", -1.2, -0.2), GAMMA, DELTA],
        constraints: &[Constraint::NonZero("A"), Constraint::Negative("B")],
        signed: false,
        function: None,
        psi: Some(PSI_38),
        fhat: FHAT_38,
        generators: &[
            TRANSLATION,
            [
                "2*sqrt(abs(B))*exp(-2*sqrt(abs(B))*tau)*x",
                "-2*exp(-2*sqrt(abs(B))*tau)",
                "exp(-2*sqrt(abs(B))*tau)*sqrt(abs(B))*((sqrt(abs(B)) + 2*Gamma)*Delta*exp(-Gamma*x^2/2)*x^(3/2+A) \
                 + (sqrt(abs(B))*x^2 + 2*A - 1)*phi)",
            ],
            [
                "2*sqrt(abs(B))*exp(2*sqrt(abs(B))*tau)*x",
                "2*exp(2*sqrt(abs(B))*tau)",
                "-exp(2*sqrt(abs(B))*tau)*sqrt(abs(B))*((sqrt(abs(B)) - 2*Gamma)*Delta*exp(-Gamma*x^2/2)*x^(3/2+A) \
                 + (sqrt(abs(B))*x^2 + 1 - 2*A)*phi)",
            ],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_3_8_3",
        params: &[A, B, GAMMA],
        constraints: &[Constraint::NonZero("A")],
        signed: false,
        function: None,
        psi: Some("exp(B*x^2/2)*x^((2-4*A)/4)*phi + Gamma"),
        fhat: "2*exp(-B*x^2/2)*x^(A-5/2)*psi*(A*B*x^2 - 2*A*ln(abs(psi))) \
               + Gamma/4*exp(-B*x^2/2)*x^(A-5/2)*(3 - 8*A) + Gamma*exp(-B*x^2/2)*x^(A-5/2)*(B*x^2 - A)^2",
        generators: &[
            TRANSLATION,
            ["2*x", "4*tau", "2*B*Gamma*exp(-B*x^2/2)*x^(3/2+A) + (2*A - 1)*phi"],
            [
                "4*x*tau",
                "4*tau^2",
                "-(Gamma*exp(-B*x^2/2)*(1 - 4*B*tau)*x^(3/2+A) + ((2 - 4*A)*tau + x^2)*phi)",
            ],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_4_1",
        params: &[p("A", 4.5, 6.0), p("B", 0.2, 1.0)],
        constraints: &[Constraint::NonZero("A"), Constraint::NonZero("B"), Constraint::Positive("A^2 - 16*B")],
        signed: false,
        function: None,
        psi: None,
        fhat: FHAT_4,
        generators: &[
            TRANSLATION,
            ["0", "0", "exp(A*tau)*phi"],
            [
                "4*exp((A - sqrt(A^2 - 16*B))*tau/2)",
                "0",
                "(sqrt(A^2 - 16*B) - A)*exp((A - sqrt(A^2 - 16*B))*tau/2)*x*phi",
            ],
            [
                "4*exp((sqrt(A^2 - 16*B) + A)*tau/2)",
                "0",
                "-(sqrt(A^2 - 16*B) + A)*exp((sqrt(A^2 - 16*B) + A)*tau/2)*x*phi",
            ],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_4_2",
        params: &[A, p("B", 0.2, 1.0)],
        constraints: &[Constraint::NonZero("A"), Constraint::NonZero("B"), Constraint::Negative("A^2 - 16*B")],
        signed: false,
        function: None,
        psi: None,
        fhat: FHAT_4,
        generators: &[
            TRANSLATION,
            ["0", "0", "exp(A*tau)*phi"],
            [
                "4*exp(A*tau/2)*sin(sqrt(abs(A^2 - 16*B))*tau/2)",
                "0",
                "-exp(A*tau/2)*x*(sqrt(abs(A^2 - 16*B))*cos(sqrt(abs(A^2 - 16*B))*tau/2) \
                 + A*sin(sqrt(abs(A^2 - 16*B))*tau/2))*phi",
            ],
            [
                "4*exp(A*tau/2)*cos(sqrt(abs(A^2 - 16*B))*tau/2)",
                "0",
                "exp(A*tau/2)*x*(sqrt(abs(A^2 - 16*B))*sin(sqrt(abs(A^2 - 16*B))*tau/2) \
                 - A*cos(sqrt(abs(A^2 - 16*B))*tau/2))*phi",
            ],
        ],
        patch: None,
        reading: None,
    },
    EntryData {
        id: "A_4_3",
        params: &[],
        constraints: &[],
        signed: true,
        function: None,
        psi: None,
        fhat: "phi*(x^2/16 + s*ln(abs(phi)))",
        generators: &[
            TRANSLATION,
            ["0", "0", "exp(s*tau)*phi"],
            ["4*exp(s*tau/2)", "0", "-s*exp(s*tau/2)*x*phi"],
            ["4*exp(s*tau/2)*tau", "0", "-exp(tau/2)*(2 + s*tau)*x*phi"],
        ],
        patch: Some(Patch {
            fhat: None,
            psi: None,
            generators: Some(&[
                TRANSLATION,
                ["0", "0", "exp(s*tau)*phi"],
                ["4*exp(s*tau/2)", "0", "-s*exp(s*tau/2)*x*phi"],
                ["4*exp(s*tau/2)*tau", "0", "-exp(s*tau/2)*(2 + s*tau)*x*phi"],
            ]),
            note: "exp(tau/2) in the last generator becomes exp(+/-tau/2); unchanged for the upper sign",
        }),
        reading: None,
    },
    EntryData {
        id: "A_4_4",
        params: &[A, B],
        constraints: &[Constraint::NonZero("A")],
        signed: false,
        function: None,
        psi: None,
        fhat: "phi*(A*ln(abs(phi)) + B*x)",
        generators: &[
            TRANSLATION,
            ["0", "0", "exp(A*tau)*phi"],
            ["A", "0", "-B*phi"],
            ["2*exp(A*tau)", "0", "-exp(A*tau)*(A*x - 2*B*tau)*phi"],
        ],
        patch: None,
        reading: None,
    },
];
