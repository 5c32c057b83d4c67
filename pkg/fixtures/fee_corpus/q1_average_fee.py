# Solution: average transaction fee across all merchant category codes.

def rule_applies(rule, mcc):
    # Empty rule fields act as wildcards.
    if rule["mcc"] is None:
        return True
    return mcc in rule["mcc"]

def compute_fee(rules, mcc, amount):
    for rule in rules:
        if rule_applies(rule, mcc):
            return rule["fixed_amount"] + rule["rate"] * amount / 10000
    return 0.0

def find_all_mccs(rules):
    mccs = []
    for rule in rules:
        if rule["mcc"] is None:
            continue
        for mcc in rule["mcc"]:
            if mcc not in mccs:
                mccs = mccs + [mcc]
    return mccs

def sum_fee(rules, amount):
    total = 0.0
    count = 0
    for mcc in find_all_mccs(rules):
        total = total + compute_fee(rules, mcc, amount)
        count = count + 1
    return total, count

def average_fee(rules, amount):
    summed = sum_fee(rules, amount)
    return summed[0] / summed[1]

def output_average_fee(rules, amount):
    avg = average_fee(rules, amount)
    return "Average fee: " + str(avg)
