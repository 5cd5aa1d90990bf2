import { describe, expect, it } from 'vitest';

import { isValidIsoDate, validatePledgeForm } from '../src/validation.js';
import type { PledgeFormFields } from '../src/types.js';

const VALID: PledgeFormFields = {
  speaker: 'Labour',
  dateMade: '2024-07-04',
  geoScope: 'UK',
  claim: 'We will ban trail hunting',
  rangeStart: '2024-07-05',
  rangeEnd: '2024-09-30',
};

describe('validatePledgeForm', () => {
  it('accepts a valid form', () => {
    expect(validatePledgeForm(VALID)).toEqual([]);
  });

  it('rejects an empty claim', () => {
    const errors = validatePledgeForm({ ...VALID, claim: '   ' });
    expect(errors.map((e) => e.field)).toContain('claim');
  });

  it('rejects an empty speaker', () => {
    const errors = validatePledgeForm({ ...VALID, speaker: '' });
    expect(errors.map((e) => e.field)).toContain('speaker');
  });

  it('rejects impossible calendar dates', () => {
    const errors = validatePledgeForm({ ...VALID, dateMade: '2024-13-40' });
    expect(errors.map((e) => e.field)).toContain('dateMade');
  });

  it('rejects an inverted monitoring range', () => {
    const errors = validatePledgeForm({ ...VALID, rangeStart: '2024-10-01' });
    expect(errors.map((e) => e.field)).toContain('rangeStart');
  });
});

describe('isValidIsoDate', () => {
  it('validates real dates only', () => {
    expect(isValidIsoDate('2024-02-29')).toBe(true);
    expect(isValidIsoDate('2023-02-29')).toBe(false);
    expect(isValidIsoDate('2024-7-4')).toBe(false);
    expect(isValidIsoDate('04-07-2024')).toBe(false);
  });
});
