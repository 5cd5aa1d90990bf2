// Client-side validation mirroring the server's pledge checks, so users
// get inline errors without a round trip. The server remains the authority.

import type { PledgeFormFields } from './types.js';

export interface FieldError {
  field: keyof PledgeFormFields;
  message: string;
}

const ISO_DATE = /^(\d{4})-(\d{2})-(\d{2})$/;

export function isValidIsoDate(value: string): boolean {
  const match = ISO_DATE.exec(value);
  if (!match) return false;
  const [year, month, day] = [Number(match[1]), Number(match[2]), Number(match[3])];
  const parsed = new Date(Date.UTC(year, month - 1, day));
  return (
    parsed.getUTCFullYear() === year &&
    parsed.getUTCMonth() === month - 1 &&
    parsed.getUTCDate() === day
  );
}

export function validatePledgeForm(fields: PledgeFormFields): FieldError[] {
  const errors: FieldError[] = [];
  if (!fields.claim.trim()) {
    errors.push({ field: 'claim', message: 'Claim must not be empty' });
  }
  if (!fields.speaker.trim()) {
    errors.push({ field: 'speaker', message: 'Speaker must not be empty' });
  }
  if (!isValidIsoDate(fields.dateMade)) {
    errors.push({ field: 'dateMade', message: 'Pledge date must be a valid YYYY-MM-DD date' });
  }
  if (!isValidIsoDate(fields.rangeStart)) {
    errors.push({ field: 'rangeStart', message: 'Range start must be a valid YYYY-MM-DD date' });
  }
  if (!isValidIsoDate(fields.rangeEnd)) {
    errors.push({ field: 'rangeEnd', message: 'Range end must be a valid YYYY-MM-DD date' });
  }
  if (
    isValidIsoDate(fields.rangeStart) &&
    isValidIsoDate(fields.rangeEnd) &&
    fields.rangeStart > fields.rangeEnd
  ) {
    errors.push({ field: 'rangeStart', message: 'Range start must not be after range end' });
  }
  return errors;
}
