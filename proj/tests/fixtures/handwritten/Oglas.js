import { Oglas_Base } from './Oglas_Base.js';

// Created once and never overwritten. Override Oglas_Base methods here.
export class Oglas extends Oglas_Base {
  async selectValid(today = new Date()) {
    const day = today.toISOString().slice(0, 10);
    const rows = await this.selectAll();
    return rows.filter((r) => r.ValidFrom <= day && (r.ValidTo == null || day <= r.ValidTo));
  }

  eligible(oglas, points) {
    if (oglas.MinPoeni != null && points < oglas.MinPoeni) return false;
    if (oglas.MaxPoeni != null && points > oglas.MaxPoeni) return false;
    return true;
  }
}
