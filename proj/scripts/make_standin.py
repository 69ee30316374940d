#!/usr/bin/env python3
"""Generate the bundled 50-row stand-in credit table.

Same column layout as the classic 1000-row credit-risk table, so the real
file fetched by scripts/fetch_german.sh drops in without schema changes.
Fully deterministic: a fixed seed and only the stdlib RNG.
"""

import math
import random

SEED = 20
N = 50
OUT = "data/german_standin.csv"

COLUMNS = [
    "checking_status", "duration", "credit_history", "purpose", "credit_amount",
    "savings_status", "employment", "installment_commitment", "personal_status",
    "other_parties", "residence_since", "property_magnitude", "age",
    "other_payment_plans", "housing", "existing_credits", "job",
    "num_dependents", "own_telephone", "foreign_worker", "class",
]


def sigmoid(z):
    return 1.0 / (1.0 + math.exp(-z))


def make_row(rng):
    # age drives the sensitive attribute (age > 25); roughly three quarters
    # of applicants are on the older side, and age is kept independent of
    # the modelled features so it stays hard to predict from them
    if rng.random() < 0.76:
        age = rng.randint(26, 68)
    else:
        age = rng.randint(19, 25)

    checking = rng.choices(["A11", "A12", "A13", "A14"], weights=[27, 27, 6, 40])[0]
    duration = rng.choice([6, 9, 12, 15, 18, 24, 30, 36, 42, 48])
    amount = rng.randint(3, 120) * 100
    installment = rng.randint(1, 4)
    residence = rng.randint(1, 4)

    history = rng.choices(["A30", "A31", "A32", "A33", "A34"],
                          weights=[4, 5, 53, 9, 29])[0]
    purpose = rng.choices(["A40", "A41", "A42", "A43", "A46", "A49"],
                          weights=[23, 10, 18, 28, 5, 10])[0]
    savings = rng.choices(["A61", "A62", "A63", "A64", "A65"],
                          weights=[60, 10, 6, 5, 19])[0]
    employment = rng.choices(["A71", "A72", "A73", "A74", "A75"],
                             weights=[6, 17, 34, 17, 26])[0]
    personal = rng.choices(["A91", "A92", "A93", "A94"], weights=[5, 31, 55, 9])[0]
    parties = rng.choices(["A101", "A102", "A103"], weights=[91, 4, 5])[0]
    prop = rng.choices(["A121", "A122", "A123", "A124"], weights=[28, 23, 33, 16])[0]
    plans = rng.choices(["A141", "A142", "A143"], weights=[14, 5, 81])[0]
    housing = rng.choices(["A151", "A152", "A153"], weights=[18, 71, 11])[0]
    credits = rng.choices([1, 2, 3], weights=[63, 33, 4])[0]
    job = rng.choices(["A171", "A172", "A173", "A174"], weights=[2, 20, 63, 15])[0]
    dependents = rng.choices([1, 2], weights=[84, 16])[0]
    telephone = rng.choices(["A191", "A192"], weights=[60, 40])[0]
    foreign = rng.choices(["A201", "A202"], weights=[96, 4])[0]

    # creditworthiness depends on the checking account, loan length and size
    logit = 2.7
    logit += {"A11": -1.3, "A12": -0.5, "A13": 0.4, "A14": 1.0}[checking]
    logit -= duration / 30.0
    logit -= amount / 8000.0
    good = 1 if rng.random() < sigmoid(logit) else 0

    return [checking, duration, history, purpose, amount, savings, employment,
            installment, personal, parties, residence, prop, age, plans,
            housing, credits, job, dependents, telephone, foreign, good]


def main():
    rng = random.Random(SEED)
    rows = [make_row(rng) for _ in range(N)]
    with open(OUT, "w") as f:
        f.write(",".join(COLUMNS) + "\n")
        for row in rows:
            f.write(",".join(str(v) for v in row) + "\n")
    good = sum(r[-1] for r in rows)
    older = sum(1 for r in rows if r[12] > 25)
    print(f"wrote {OUT}: {len(rows)} rows, {good} good, {older} over 25")


if __name__ == "__main__":
    main()
